import type { ReviewSession } from "./session.js";
import type {
  ArtifactRecord,
  Neighbor,
  ProgressResponse,
  Suggestion,
  SuggestionResponse,
} from "./types.js";

/** Pure HTML-string renderers. Every number shown comes verbatim from a
 * service payload (exact values ride along in data- attributes). */

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

export function hopTag(distance: number): string {
  return `${distance} hop${distance === 1 ? "" : "s"}`;
}

export function renderArtifact(artifact: ArtifactRecord): string {
  const context = [artifact.document_title, artifact.section_title]
    .filter((part): part is string => !!part)
    .map((part) => `<span class="context">${escapeHtml(part)}</span>`)
    .join(" › ");
  return `
    <section class="artifact" data-artifact-id="${escapeHtml(artifact.id)}">
      <div class="artifact-head">
        <span class="artifact-id">${escapeHtml(artifact.id)}</span>
        ${context}
      </div>
      <p class="artifact-text">${escapeHtml(artifact.text)}</p>
    </section>`;
}

function decisionClass(session: ReviewSession, nodeId: string): string {
  const decision = session.decisionFor(nodeId);
  return decision ? ` ${decision}` : "";
}

export function renderNeighbor(session: ReviewSession, neighbor: Neighbor): string {
  const id = escapeHtml(neighbor.node_id);
  return `
      <li class="neighbor${decisionClass(session, neighbor.node_id)}"
          data-node-id="${id}" data-distance="${neighbor.distance}">
        <span class="hops">${hopTag(neighbor.distance)}</span>
        <span class="node-label">${escapeHtml(neighbor.label)}</span>
        <span class="node-id">${id}</span>
        <button data-action="accept" data-node-id="${id}">accept</button>
        <button data-action="reject" data-node-id="${id}">reject</button>
      </li>`;
}

export function renderSuggestionCard(
  session: ReviewSession,
  suggestion: Suggestion,
  focused: boolean,
): string {
  const id = escapeHtml(suggestion.node_id);
  const neighbors = suggestion.neighbors
    .map((neighbor) => renderNeighbor(session, neighbor))
    .join("");
  return `
    <article class="card${focused ? " focused" : ""}${decisionClass(session, suggestion.node_id)}"
             data-card data-node-id="${id}" data-rank="${suggestion.rank}"
             data-score="${suggestion.score}">
      <header>
        <span class="rank">#${suggestion.rank}</span>
        <span class="node-label">${escapeHtml(suggestion.label)}</span>
        <span class="node-id">${id}</span>
        <span class="score" title="cosine similarity">${suggestion.score.toFixed(4)}</span>
      </header>
      <div class="card-actions">
        <button data-action="accept" data-node-id="${id}">accept</button>
        <button data-action="reject" data-node-id="${id}">reject</button>
        <button data-action="expand" data-node-id="${id}">neighborhood (${suggestion.neighbors.length})</button>
      </div>
      <ul class="neighbors" data-neighbors-for="${id}" hidden>${neighbors}
      </ul>
    </article>`;
}

export function renderSuggestions(session: ReviewSession, response: SuggestionResponse): string {
  const cards = response.suggestions
    .map((suggestion, index) =>
      renderSuggestionCard(session, suggestion, index === session.focusedIndex),
    )
    .join("\n");
  return `
    <section class="suggestions" data-taxonomy="${escapeHtml(response.taxonomy_name)}"
             data-model="${escapeHtml(response.model)}" data-k="${response.k}"
             data-radius="${response.radius}">
      ${cards}
    </section>`;
}

export function renderProgress(progress: ProgressResponse, taxonomy: string): string {
  const row = progress.taxonomies.find((r) => r.taxonomy === taxonomy);
  if (!row) return "";
  const percent = progress.dataset_size === 0 ? 0 : (100 * row.reviewed) / progress.dataset_size;
  return `
    <div class="progress" data-reviewed="${row.reviewed}" data-pending="${row.pending}">
      <div class="progress-bar" style="width: ${percent}%"></div>
      <span>${row.reviewed} / ${progress.dataset_size} reviewed in ${escapeHtml(taxonomy)}</span>
    </div>`;
}

export function renderError(message: string): string {
  return `
    <div class="error-banner">
      <span>${escapeHtml(message)}</span>
      <button data-action="retry">retry</button>
    </div>`;
}

export function renderSaveBar(session: ReviewSession): string {
  const staged = session.stagedAccepted().length + session.stagedRejected().length;
  return `
    <footer class="save-bar">
      <button data-action="prev">&larr; prev</button>
      <span class="cursor">${session.cursor + 1} / ${session.size}</span>
      <button data-action="next">next &rarr;</button>
      <button data-action="save" ${session.canSave ? "" : "disabled"}>
        save ${staged} decision${staged === 1 ? "" : "s"}
      </button>
      ${session.hasUnsaved ? '<span class="unsaved">unsaved decisions</span>' : ""}
    </footer>`;
}

export interface ViewState {
  session: ReviewSession;
  progress: ProgressResponse | null;
  error: string | null;
}

export function renderApp(state: ViewState): string {
  const { session, progress, error } = state;
  const parts = [
    `<header class="top"><h1>review</h1>${
      progress ? renderProgress(progress, session.taxonomy) : ""
    }</header>`,
  ];
  if (error) parts.push(renderError(error));
  parts.push(renderArtifact(session.artifact));
  if (session.suggestions) {
    parts.push(renderSuggestions(session, session.suggestions));
  } else if (!error) {
    parts.push('<p class="loading">loading suggestions…</p>');
  }
  parts.push(renderSaveBar(session));
  return parts.join("\n");
}
