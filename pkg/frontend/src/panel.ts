import type { ActionResult } from "./types";

/** Catalog mirror for the action chooser; ids come from the controller. */
export const ACTION_CATALOG: ReadonlyArray<{ id: number; label: string }> = [
  { id: 1, label: "Sensor On" },
  { id: 2, label: "Sensor Off" },
  { id: 3, label: "WiFi On" },
  { id: 4, label: "WiFi Off" },
  { id: 5, label: "AP Connection Count" },
  { id: 6, label: "Sensor to AP" },
  { id: 7, label: "AP to Sensor" },
  { id: 8, label: "Reboot" },
  { id: 9, label: "Connectivity Check" },
  { id: 10, label: "Sensor Status" },
  { id: 11, label: "AP Status" },
];

const STATUS_ACTIONS = new Set([10, 11]);
const AP_COUNT_ACTION = 5;

/**
 * Chip text for one per-target outcome. Counts render as numbers, status
 * reads as badges, everything else as a plain ok/value chip. The value is
 * displayed as returned; no client-side reinterpretation.
 */
export function formatResult(actionId: number, result: ActionResult): string {
  if (result.status === "timed-out") {
    return "timed out";
  }
  if (actionId === AP_COUNT_ACTION) {
    return `${result.value} ${result.value === 1 ? "client" : "clients"}`;
  }
  if (STATUS_ACTIONS.has(actionId)) {
    return result.value === 1 ? "active" : "inactive";
  }
  return `ok (${result.value})`;
}

/** Percent text for a metrics rate; null renders as a placeholder dash. */
export function formatRate(rate: number | null): string {
  return rate === null ? "-" : `${(rate * 100).toFixed(2)}%`;
}
