import type { DeviceInput } from "./types";

export type FieldErrors = Partial<Record<keyof DeviceInput, string>>;

export interface ValidationResult {
  ok: boolean;
  errors: FieldErrors;
}

/**
 * Client-side gate before POST /devices. Mirrors, but never replaces, the
 * API's own validation; server rejections are mapped back onto fields with
 * apiErrorField so they render inline next to the offending input.
 */
export function validateRegistration(input: Partial<DeviceInput>): ValidationResult {
  const errors: FieldErrors = {};
  if (!input.name || input.name.trim() === "") {
    errors.name = "name is required";
  }
  if (input.device_id === undefined || !Number.isInteger(input.device_id)) {
    errors.device_id = "device id must be an integer";
  } else if (input.device_id === 0) {
    errors.device_id = "id 0 is reserved for broadcast";
  } else if (input.device_id < 0 || input.device_id > 0xffffffff) {
    errors.device_id = "device id must fit in 32 bits";
  }
  if (input.latitude === undefined || Math.abs(input.latitude) > 90) {
    errors.latitude = "latitude must be between -90 and 90";
  }
  if (input.longitude === undefined || Math.abs(input.longitude) > 180) {
    errors.longitude = "longitude must be between -180 and 180";
  }
  if (input.mesh_role !== undefined && input.mesh_role !== "MP" && input.mesh_role !== "MPP") {
    errors.mesh_role = "role must be MP or MPP";
  }
  return { ok: Object.keys(errors).length === 0, errors };
}

/** Which form field an API error code belongs to (null: show as banner). */
export function apiErrorField(code: string): keyof DeviceInput | null {
  switch (code) {
    case "duplicate_device_id":
    case "reserved_device_id":
      return "device_id";
    case "invalid_coordinates":
      return "latitude";
    default:
      return null;
  }
}
