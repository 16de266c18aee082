/**
 * Shared target selection. The device table and the map manipulate the same
 * model, so selecting a row and clicking the matching pin are equivalent by
 * construction.
 */
export class SelectionModel {
  private readonly selected = new Set<number>();
  private broadcast = false;

  toggle(deviceId: number): void {
    this.broadcast = false;
    if (this.selected.has(deviceId)) {
      this.selected.delete(deviceId);
    } else {
      this.selected.add(deviceId);
    }
  }

  select(deviceId: number): void {
    this.broadcast = false;
    this.selected.add(deviceId);
  }

  deselect(deviceId: number): void {
    this.selected.delete(deviceId);
  }

  /** "All devices" mode; maps to targets: "all" in the dispatch request. */
  selectAll(): void {
    this.broadcast = true;
    this.selected.clear();
  }

  clear(): void {
    this.broadcast = false;
    this.selected.clear();
  }

  has(deviceId: number): boolean {
    return this.selected.has(deviceId);
  }

  isBroadcast(): boolean {
    return this.broadcast;
  }

  get size(): number {
    return this.selected.size;
  }

  /** Dispatch payload: ascending id list, or "all" in broadcast mode. */
  targets(): number[] | "all" {
    if (this.broadcast) {
      return "all";
    }
    return [...this.selected].sort((a, b) => a - b);
  }

  /** Drop selections for devices that no longer exist. */
  retain(existing: Iterable<number>): void {
    const keep = new Set(existing);
    for (const id of this.selected) {
      if (!keep.has(id)) {
        this.selected.delete(id);
      }
    }
  }
}
