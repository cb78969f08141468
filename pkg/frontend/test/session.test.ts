import { describe, expect, it } from "vitest";

import { keyToAction } from "../src/keyboard.js";
import { ReviewSession } from "../src/session.js";
import { ARTIFACTS, suggestionResponse } from "./fixtures.js";

function makeSession() {
  const session = new ReviewSession(ARTIFACTS, { taxonomy: "T", reviewer: "alice", k: 15 });
  session.setSuggestions(suggestionResponse());
  return session;
}

describe("ReviewSession", () => {
  it("refuses an empty dataset", () => {
    expect(() => new ReviewSession([], { taxonomy: "T", reviewer: "a" })).toThrow();
  });

  it("keeps the cursor within dataset bounds", () => {
    const session = makeSession();
    expect(session.prev().moved).toBe(false);
    expect(session.next().moved).toBe(true);
    expect(session.next().moved).toBe(true);
    expect(session.next().moved).toBe(false);
    expect(session.cursor).toBe(2);
  });

  it("rejects suggestions for a different artifact", () => {
    const session = makeSession();
    expect(() => session.setSuggestions(suggestionResponse("req-999"))).toThrow(/do not match/);
  });

  it("stages decisions with toggle semantics", () => {
    const session = makeSession();
    session.toggle("T0001", "accepted");
    expect(session.decisionFor("T0001")).toBe("accepted");
    session.toggle("T0001", "rejected");
    expect(session.decisionFor("T0001")).toBe("rejected");
    session.toggle("T0001", "rejected");
    expect(session.decisionFor("T0001")).toBeUndefined();
  });

  it("accepts decisions on displayed neighbors, rejects others", () => {
    const session = makeSession();
    session.toggle("T0100", "accepted"); // a neighbor, not a top-k suggestion
    expect(session.stagedAccepted()).toEqual(["T0100"]);
    expect(() => session.toggle("ZZZZ", "accepted")).toThrow(/not displayed/);
  });

  it("blocks navigation over unsaved decisions unless forced", () => {
    const session = makeSession();
    session.toggle("T0001", "accepted");
    expect(session.next()).toEqual({ moved: false, blocked: true });
    expect(session.cursor).toBe(0);
    expect(session.next(true)).toEqual({ moved: true, blocked: false });
    expect(session.cursor).toBe(1);
    expect(session.hasUnsaved).toBe(false);
  });

  it("blocks all-undecided saves", () => {
    const session = makeSession();
    expect(session.canSave).toBe(false);
    expect(() => session.annotationBody()).toThrow(/all-undecided/);
  });

  it("builds a sorted annotation body", () => {
    const session = makeSession();
    session.toggle("T0003", "accepted");
    session.toggle("T0001", "accepted");
    session.toggle("T0002", "rejected");
    expect(session.annotationBody()).toEqual({
      artifact_id: "req-001",
      taxonomy_name: "T",
      accepted: ["T0001", "T0003"],
      rejected: ["T0002"],
      reviewer: "alice",
    });
    session.markSaved();
    expect(session.hasUnsaved).toBe(false);
  });

  it("clears staged state and suggestions on navigation", () => {
    const session = makeSession();
    session.toggle("T0001", "accepted");
    session.next(true);
    expect(session.suggestions).toBeNull();
    expect(session.stagedAccepted()).toEqual([]);
  });

  it("supports a full keyboard pass over the dataset", () => {
    const session = makeSession();
    // focus second card, accept it, save, advance: all via key actions
    expect(keyToAction("j")).toBe("focus-next");
    session.focusNext();
    session.toggleFocused("accepted");
    expect(session.stagedAccepted()).toEqual(["T0002"]);
    expect(keyToAction("s")).toBe("save");
    const body = session.annotationBody();
    expect(body.accepted).toEqual(["T0002"]);
    session.markSaved();
    expect(keyToAction("n")).toBe("next-artifact");
    expect(session.next().moved).toBe(true);
    session.setSuggestions(suggestionResponse("req-002"));
    session.toggleFocused("rejected");
    expect(session.stagedRejected()).toEqual(["T0001"]);
    expect(keyToAction("p")).toBe("prev-artifact");
    expect(keyToAction("ArrowUp")).toBe("focus-prev");
    expect(keyToAction("?")).toBeNull();
  });

  it("clamps keyboard focus to the card range", () => {
    const session = makeSession();
    for (let i = 0; i < 40; i += 1) session.focusNext();
    expect(session.focusedIndex).toBe(14);
    for (let i = 0; i < 40; i += 1) session.focusPrev();
    expect(session.focusedIndex).toBe(0);
  });
});
