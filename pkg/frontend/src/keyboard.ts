/** Keyboard map: the whole review loop is drivable without a mouse. */

export type KeyAction =
  | "focus-next"
  | "focus-prev"
  | "toggle-accept"
  | "toggle-reject"
  | "next-artifact"
  | "prev-artifact"
  | "save";

const KEY_MAP: Record<string, KeyAction> = {
  j: "focus-next",
  ArrowDown: "focus-next",
  k: "focus-prev",
  ArrowUp: "focus-prev",
  a: "toggle-accept",
  x: "toggle-reject",
  r: "toggle-reject",
  n: "next-artifact",
  ArrowRight: "next-artifact",
  p: "prev-artifact",
  ArrowLeft: "prev-artifact",
  s: "save",
  Enter: "save",
};

export function keyToAction(key: string): KeyAction | null {
  return KEY_MAP[key] ?? null;
}
