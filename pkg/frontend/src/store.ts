import type {
  DeviceCounters,
  DeviceRecord,
  MetricsReport,
  TopologyView,
  TraceEvent,
} from "./types";

/** Table/map row: registry record plus live status, a pure API projection. */
export interface UiDeviceView extends DeviceRecord {
  alive: boolean;
  sensor_active: boolean;
  ap_active: boolean;
  ap_clients: number;
  lastSeen: number | null;
  pending: boolean;
  counters: DeviceCounters | null;
}

const EMPTY_STATUS = {
  alive: true,
  sensor_active: false,
  ap_active: false,
  ap_clients: 0,
};

/**
 * Client-side cache of controller state. Every field is copied verbatim from
 * an API response or the event stream; the store does no arithmetic of its
 * own, so a rendered counter always equals what GET /metrics said.
 */
export class DeviceStore {
  private records = new Map<number, DeviceRecord>();
  private status = new Map<number, typeof EMPTY_STATUS>();
  private counters = new Map<number, DeviceCounters>();
  private lastSeen = new Map<number, number>();
  private pending = new Map<number, number>();
  private cursor = 0;

  setDevices(devices: DeviceRecord[]): void {
    this.records = new Map(devices.map((d) => [d.device_id, d]));
  }

  applyTopology(topology: TopologyView): void {
    for (const node of topology.nodes) {
      this.status.set(node.id, {
        alive: node.alive,
        sensor_active: node.sensor_active,
        ap_active: node.ap_active,
        ap_clients: node.ap_clients,
      });
    }
  }

  applyMetrics(report: MetricsReport): void {
    for (const [id, row] of Object.entries(report.devices)) {
      this.counters.set(Number(id), row);
    }
  }

  /** Feed one event-stream record; returns true when something changed. */
  applyEvent(event: TraceEvent): boolean {
    if (event.seq < this.cursor) {
      return false; // replayed backlog
    }
    this.cursor = event.seq + 1;
    if (event.type === "tx" && typeof event.sender === "number") {
      this.lastSeen.set(event.sender, event.t);
      return true;
    }
    if (event.type === "rx" && typeof event.receiver === "number") {
      this.lastSeen.set(event.receiver, event.t);
      return true;
    }
    if (event.type === "device" && event.op === "deleted") {
      const device = event.device as { device_id: number };
      this.records.delete(device.device_id);
      return true;
    }
    return event.type === "correlation" || event.type === "link";
  }

  /** Next value for the events `since` query parameter. */
  nextEventCursor(): number {
    return this.cursor;
  }

  markPending(deviceId: number): void {
    this.pending.set(deviceId, (this.pending.get(deviceId) ?? 0) + 1);
  }

  resolvePending(deviceId: number): void {
    const count = this.pending.get(deviceId) ?? 0;
    if (count <= 1) {
      this.pending.delete(deviceId);
    } else {
      this.pending.set(deviceId, count - 1);
    }
  }

  rows(): UiDeviceView[] {
    const ids = [...this.records.keys()].sort((a, b) => a - b);
    return ids.map((id) => {
      const record = this.records.get(id)!;
      const status = this.status.get(id) ?? EMPTY_STATUS;
      return {
        ...record,
        ...status,
        lastSeen: this.lastSeen.get(id) ?? null,
        pending: (this.pending.get(id) ?? 0) > 0,
        counters: this.counters.get(id) ?? null,
      };
    });
  }

  row(deviceId: number): UiDeviceView | null {
    return this.rows().find((r) => r.device_id === deviceId) ?? null;
  }
}
