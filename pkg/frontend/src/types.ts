/** Payload shapes of the review service API. The UI renders these values
 * verbatim; it never computes rankings or distances itself. */

export interface ArtifactRecord {
  id: string;
  text: string;
  document_title: string | null;
  section_title: string | null;
}

export interface Neighbor {
  node_id: string;
  label: string;
  distance: number;
}

export interface Suggestion {
  node_id: string;
  label: string;
  score: number;
  rank: number;
  neighbors: Neighbor[];
}

export interface SuggestionResponse {
  artifact_id: string;
  taxonomy_name: string;
  model: string;
  k: number;
  radius: number;
  suggestions: Suggestion[];
}

export interface AnnotationBody {
  artifact_id: string;
  taxonomy_name: string;
  accepted: string[];
  rejected: string[];
  reviewer: string;
}

export interface AnnotationRecord extends AnnotationBody {
  timestamp: string;
}

export interface ProgressRow {
  taxonomy: string;
  reviewed: number;
  pending: number;
}

export interface ProgressResponse {
  dataset_size: number;
  taxonomies: ProgressRow[];
}

export type Decision = "accepted" | "rejected";
