import type { ArtifactRecord, Decision, SuggestionResponse } from "./types.js";

export interface SessionOptions {
  taxonomy: string;
  reviewer: string;
  k?: number;
  radius?: number;
}

export type NavResult = { moved: boolean; blocked: boolean };

/**
 * Client-side review state: dataset cursor, the currently displayed
 * suggestions, and staged accept/reject decisions.
 *
 * Decisions may only reference nodes that are actually on screen (a
 * suggestion or one of its neighbors), navigation away from unsaved
 * decisions is blocked unless forced, and saving with no decisions at
 * all is refused.
 */
export class ReviewSession {
  readonly taxonomy: string;
  readonly reviewer: string;
  readonly k: number | undefined;
  readonly radius: number | undefined;

  private cursorIndex = 0;
  private decisions = new Map<string, Decision>();
  private current: SuggestionResponse | null = null;
  private focusIndex = 0;

  constructor(
    private readonly artifacts: ArtifactRecord[],
    options: SessionOptions,
  ) {
    if (artifacts.length === 0) throw new Error("cannot review an empty dataset");
    this.taxonomy = options.taxonomy;
    this.reviewer = options.reviewer;
    this.k = options.k;
    this.radius = options.radius;
  }

  get cursor(): number {
    return this.cursorIndex;
  }

  get size(): number {
    return this.artifacts.length;
  }

  get artifact(): ArtifactRecord {
    const artifact = this.artifacts[this.cursorIndex];
    if (!artifact) throw new Error(`cursor ${this.cursorIndex} out of bounds`);
    return artifact;
  }

  get suggestions(): SuggestionResponse | null {
    return this.current;
  }

  get focusedIndex(): number {
    return this.focusIndex;
  }

  setSuggestions(response: SuggestionResponse): void {
    if (response.artifact_id !== this.artifact.id) {
      throw new Error(
        `suggestions for ${response.artifact_id} do not match cursor artifact ${this.artifact.id}`,
      );
    }
    this.current = response;
    this.focusIndex = 0;
  }

  /** Node ids currently on screen: suggestions plus their neighbors. */
  displayedNodeIds(): Set<string> {
    const ids = new Set<string>();
    for (const suggestion of this.current?.suggestions ?? []) {
      ids.add(suggestion.node_id);
      for (const neighbor of suggestion.neighbors) ids.add(neighbor.node_id);
    }
    return ids;
  }

  decisionFor(nodeId: string): Decision | undefined {
    return this.decisions.get(nodeId);
  }

  /** Toggle semantics: same decision clears, different decision switches. */
  toggle(nodeId: string, decision: Decision): void {
    if (!this.displayedNodeIds().has(nodeId)) {
      throw new Error(`node ${nodeId} is not displayed for this artifact`);
    }
    if (this.decisions.get(nodeId) === decision) {
      this.decisions.delete(nodeId);
    } else {
      this.decisions.set(nodeId, decision);
    }
  }

  get hasUnsaved(): boolean {
    return this.decisions.size > 0;
  }

  get canSave(): boolean {
    return this.decisions.size > 0;
  }

  stagedAccepted(): string[] {
    return [...this.decisions.entries()]
      .filter(([, d]) => d === "accepted")
      .map(([id]) => id)
      .sort();
  }

  stagedRejected(): string[] {
    return [...this.decisions.entries()]
      .filter(([, d]) => d === "rejected")
      .map(([id]) => id)
      .sort();
  }

  annotationBody() {
    if (!this.canSave) throw new Error("refusing to save an all-undecided annotation");
    return {
      artifact_id: this.artifact.id,
      taxonomy_name: this.taxonomy,
      accepted: this.stagedAccepted(),
      rejected: this.stagedRejected(),
      reviewer: this.reviewer,
    };
  }

  /** Called after a successful POST; staged state survives failures. */
  markSaved(): void {
    this.decisions.clear();
  }

  next(force = false): NavResult {
    return this.moveTo(this.cursorIndex + 1, force);
  }

  prev(force = false): NavResult {
    return this.moveTo(this.cursorIndex - 1, force);
  }

  private moveTo(index: number, force: boolean): NavResult {
    if (index < 0 || index >= this.artifacts.length) {
      return { moved: false, blocked: false };
    }
    if (this.hasUnsaved && !force) {
      return { moved: false, blocked: true };
    }
    this.cursorIndex = index;
    this.decisions.clear();
    this.current = null;
    this.focusIndex = 0;
    return { moved: true, blocked: false };
  }

  // -- keyboard focus over suggestion cards --------------------------------

  focusNext(): void {
    const count = this.current?.suggestions.length ?? 0;
    if (count > 0) this.focusIndex = Math.min(this.focusIndex + 1, count - 1);
  }

  focusPrev(): void {
    if ((this.current?.suggestions.length ?? 0) > 0) {
      this.focusIndex = Math.max(this.focusIndex - 1, 0);
    }
  }

  toggleFocused(decision: Decision): void {
    const focused = this.current?.suggestions[this.focusIndex];
    if (focused) this.toggle(focused.node_id, decision);
  }
}
