import type {
  ConnectivityResult,
  DeviceInput,
  DeviceRecord,
  DispatchRequest,
  DispatchResponse,
  MetricsReport,
  TopologyLink,
  TopologyView,
  TraceEvent,
} from "./types";

export class ApiRequestError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiRequestError";
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/** Parse an SSE body: every `data:` line is one JSON trace record. */
export function parseEventStream(text: string): TraceEvent[] {
  const events: TraceEvent[] = [];
  for (const line of text.split("\n")) {
    if (line.startsWith("data: ")) {
      events.push(JSON.parse(line.slice("data: ".length)) as TraceEvent);
    }
  }
  return events;
}

/**
 * Thin typed wrapper over the northbound REST API. All controller access
 * goes through here; the UI never computes state the API already serves.
 */
export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
      init.headers = { "content-type": "application/json" };
    }
    const resp = await this.fetchImpl(this.baseUrl + path, init);
    if (!resp.ok) {
      let code = "http_error";
      let message = `${method} ${path} failed with ${resp.status}`;
      try {
        const parsed = (await resp.json()) as { error?: { code: string; message: string } };
        if (parsed.error) {
          code = parsed.error.code;
          message = parsed.error.message;
        }
      } catch {
        // non-JSON error body; keep the generic message
      }
      throw new ApiRequestError(resp.status, code, message);
    }
    if (resp.status === 204) {
      return undefined as T;
    }
    return (await resp.json()) as T;
  }

  registerDevice(input: DeviceInput): Promise<DeviceRecord> {
    return this.request("POST", "/devices", input);
  }

  listDevices(): Promise<DeviceRecord[]> {
    return this.request("GET", "/devices");
  }

  getDevice(id: number): Promise<DeviceRecord> {
    return this.request("GET", `/devices/${id}`);
  }

  updateDevice(id: number, fields: Partial<Omit<DeviceRecord, "device_id">>): Promise<DeviceRecord> {
    return this.request("PUT", `/devices/${id}`, fields);
  }

  deleteDevice(id: number): Promise<void> {
    return this.request("DELETE", `/devices/${id}`);
  }

  connectivityCheck(id: number): Promise<ConnectivityResult> {
    return this.request("POST", `/devices/${id}/connectivity-check`);
  }

  dispatch(req: DispatchRequest): Promise<DispatchResponse> {
    return this.request("POST", "/actions", req);
  }

  metrics(): Promise<MetricsReport> {
    return this.request("GET", "/metrics");
  }

  topology(): Promise<TopologyView> {
    return this.request("GET", "/topology");
  }

  setLink(
    a: number,
    b: number,
    fields: { enabled?: boolean; p_err?: number },
  ): Promise<TopologyLink> {
    return this.request("PUT", `/links/${a}/${b}`, fields);
  }

  /** One backlog poll of GET /events; `since` resumes after the last seq seen. */
  async events(since = 0): Promise<TraceEvent[]> {
    const resp = await this.fetchImpl(`${this.baseUrl}/events?since=${since}`, {
      method: "GET",
    });
    if (!resp.ok) {
      throw new ApiRequestError(resp.status, "http_error", "event stream unavailable");
    }
    return parseEventStream(await resp.text());
  }
}
