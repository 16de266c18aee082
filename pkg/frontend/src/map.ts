/**
 * Offline SVG map: an equirectangular projection of registered coordinates
 * onto a fixed viewport. No tile server involved, so the console works on a
 * network-isolated deployment; pins are plain coordinates plus hit-testing.
 */

export interface MapPin {
  deviceId: number;
  x: number;
  y: number;
}

export interface Viewport {
  width: number;
  height: number;
  padding: number;
}

interface Located {
  device_id: number;
  latitude: number;
  longitude: number;
}

export class MapView {
  constructor(private readonly viewport: Viewport = { width: 800, height: 600, padding: 40 }) {}

  /**
   * Project all devices at once so the bounding box is shared; a single
   * device lands at the viewport center.
   */
  pins(devices: Located[]): MapPin[] {
    if (devices.length === 0) {
      return [];
    }
    const lats = devices.map((d) => d.latitude);
    const lons = devices.map((d) => d.longitude);
    const latSpan = Math.max(Math.max(...lats) - Math.min(...lats), 1e-9);
    const lonSpan = Math.max(Math.max(...lons) - Math.min(...lons), 1e-9);
    const minLat = Math.min(...lats);
    const minLon = Math.min(...lons);
    const { width, height, padding } = this.viewport;
    const innerW = width - 2 * padding;
    const innerH = height - 2 * padding;
    return devices.map((d) => ({
      deviceId: d.device_id,
      x: padding + ((d.longitude - minLon) / lonSpan) * innerW,
      // Screen y grows downward; latitude grows northward.
      y: padding + (1 - (d.latitude - minLat) / latSpan) * innerH,
    }));
  }

  /** Nearest pin within `radius` pixels of a click, or null. */
  hitTest(pins: MapPin[], x: number, y: number, radius = 12): MapPin | null {
    let best: MapPin | null = null;
    let bestDist = radius;
    for (const pin of pins) {
      const dist = Math.hypot(pin.x - x, pin.y - y);
      if (dist <= bestDist) {
        best = pin;
        bestDist = dist;
      }
    }
    return best;
  }

  /** Inverse projection for map-click coordinate entry on the form. */
  unproject(
    devices: Located[],
    x: number,
    y: number,
  ): { latitude: number; longitude: number } | null {
    if (devices.length === 0) {
      return null;
    }
    const lats = devices.map((d) => d.latitude);
    const lons = devices.map((d) => d.longitude);
    const latSpan = Math.max(Math.max(...lats) - Math.min(...lats), 1e-9);
    const lonSpan = Math.max(Math.max(...lons) - Math.min(...lons), 1e-9);
    const { width, height, padding } = this.viewport;
    return {
      latitude:
        Math.min(...lats) + (1 - (y - padding) / (height - 2 * padding)) * latSpan,
      longitude:
        Math.min(...lons) + ((x - padding) / (width - 2 * padding)) * lonSpan,
    };
  }
}
