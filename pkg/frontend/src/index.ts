export * from "./types";
export { ApiClient, ApiRequestError, parseEventStream } from "./client";
export { SelectionModel } from "./selection";
export { MapView, type MapPin, type Viewport } from "./map";
export { validateRegistration, apiErrorField, type ValidationResult } from "./form";
export { DeviceStore, type UiDeviceView } from "./store";
export { ACTION_CATALOG, formatResult, formatRate } from "./panel";
