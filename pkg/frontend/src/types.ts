/** Wire types of the controller's northbound REST API (see docs/api.md). */

export type MeshRole = "MPP" | "MP";

export interface DeviceRecord {
  name: string;
  device_id: number;
  sensor_type: string;
  latitude: number;
  longitude: number;
  notes: string;
  mesh_role: MeshRole;
}

/** Registration form payload; optional fields take API defaults. */
export interface DeviceInput {
  name: string;
  device_id: number;
  latitude: number;
  longitude: number;
  sensor_type?: string;
  notes?: string;
  mesh_role?: MeshRole;
}

export type ActionResult =
  | { status: "answered"; action_id: number; value: number }
  | { status: "timed-out" };

export interface DispatchRequest {
  targets: number[] | "all";
  action: number | string;
  timeout_s?: number;
  retries?: number;
}

export interface DispatchResponse {
  results: Record<string, ActionResult>;
}

export interface ConnectivityResult {
  reachable: boolean;
  duration_s: number | null;
}

export interface DeviceCounters {
  errors: number;
  retransmitted: number;
  received: number;
  sent: number;
  ignored: number;
  success_rate: number | null;
  error_rate: number | null;
}

export interface MetricsReport {
  meta: Record<string, unknown>;
  devices: Record<string, DeviceCounters>;
  aggregate: { success_rate: number | null; error_rate: number | null };
}

export interface TopologyNode {
  id: number;
  mesh_role: MeshRole;
  alive: boolean;
  sensor_active: boolean;
  ap_active: boolean;
  ap_clients: number;
}

export interface TopologyLink {
  a: number;
  b: number;
  p_err: number;
  enabled: boolean;
}

export interface TopologyView {
  nodes: TopologyNode[];
  links: TopologyLink[];
}

/** One record from GET /events; fields beyond the envelope vary by type. */
export interface TraceEvent {
  seq: number;
  type: "tx" | "rx" | "correlation" | "device" | "link";
  t: number;
  [key: string]: unknown;
}

export interface ApiErrorBody {
  error: { code: string; message: string };
}
