import type { ArtifactRecord, SuggestionResponse } from "../src/types.js";

export const ARTIFACTS: ArtifactRecord[] = [
  {
    id: "req-001",
    text: "The crossing mark shall be painted on the <road>.",
    document_title: "Regulation Signaling",
    section_title: "Level crossings",
  },
  { id: "req-002", text: "Second requirement", document_title: null, section_title: null },
  { id: "req-003", text: "Third requirement", document_title: "Doc", section_title: null },
];

/** A k=15 response with per-card neighborhoods (self at 0, two others). */
export function suggestionResponse(artifactId = "req-001", k = 15): SuggestionResponse {
  const suggestions = Array.from({ length: k }, (_, i) => ({
    node_id: `T${String(i + 1).padStart(4, "0")}`,
    label: `class ${i + 1}`,
    score: 0.9173 - i * 0.0137,
    rank: i + 1,
    neighbors: [
      { node_id: `T${String(i + 1).padStart(4, "0")}`, label: `class ${i + 1}`, distance: 0 },
      { node_id: `T${String(i + 100).padStart(4, "0")}`, label: `kin ${i}`, distance: 1 },
      { node_id: `T${String(i + 200).padStart(4, "0")}`, label: `far kin ${i}`, distance: 2 },
    ],
  }));
  return {
    artifact_id: artifactId,
    taxonomy_name: "T",
    model: "mock-48",
    k,
    radius: 2,
    suggestions,
  };
}
