import { describe, expect, it } from "vitest";

import { SelectionModel } from "../src/selection";

describe("SelectionModel", () => {
  it("toggles membership", () => {
    const sel = new SelectionModel();
    sel.toggle(3);
    expect(sel.has(3)).toBe(true);
    sel.toggle(3);
    expect(sel.has(3)).toBe(false);
  });

  it("returns targets as a sorted id list", () => {
    const sel = new SelectionModel();
    sel.select(4);
    sel.select(2);
    sel.select(9);
    expect(sel.targets()).toEqual([2, 4, 9]);
  });

  it("broadcast mode maps to the string all", () => {
    const sel = new SelectionModel();
    sel.select(2);
    sel.selectAll();
    expect(sel.targets()).toBe("all");
    expect(sel.size).toBe(0);
  });

  it("any individual pick leaves broadcast mode", () => {
    const sel = new SelectionModel();
    sel.selectAll();
    sel.toggle(5);
    expect(sel.isBroadcast()).toBe(false);
    expect(sel.targets()).toEqual([5]);
  });

  it("table and map picks are interchangeable", () => {
    // The table toggles and the map selects; both mutate one model, so
    // picking the same device through either path yields the same set.
    const viaTable = new SelectionModel();
    viaTable.toggle(2);
    viaTable.toggle(7);
    const viaMap = new SelectionModel();
    viaMap.select(7);
    viaMap.select(2);
    expect(viaTable.targets()).toEqual(viaMap.targets());
  });

  it("retain drops deleted devices", () => {
    const sel = new SelectionModel();
    sel.select(1);
    sel.select(2);
    sel.retain([2]);
    expect(sel.targets()).toEqual([2]);
  });
});
