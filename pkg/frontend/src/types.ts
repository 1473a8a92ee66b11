/** Wire types for the intervention service HTTP/JSON API. */

export type ResponseToken = "yes" | "no" | "not_feasible_now";

export interface SessionPayload {
  session_id: string;
  user_id: string;
  created_at: string;
}

export interface SuggestionPayload {
  suggestion_id: string;
  intervention_id: string;
  name: string;
  prompt: string;
  suggested_at: string;
}

export interface AckPayload {
  suggestion_id: string;
  intervention_id: string;
  response: string;
  reward: number;
  posterior_mean: number;
  alpha: number;
  beta: number;
  idempotent: boolean;
}

export interface ArmPayload {
  id: string;
  name: string;
  alpha: number;
  beta: number;
  mean: number;
}

export interface ContextStatePayload {
  decision_count: number;
  arms: ArmPayload[];
}

export interface StatePayload {
  session_id: string;
  user_id: string;
  pending: {
    suggestion_id: string;
    context: string;
    social: string;
    intervention_id: string;
    suggested_at: string;
  } | null;
  contexts: Record<string, ContextStatePayload>;
}

export const ACTIVITIES: ReadonlyArray<{ id: string; label: string }> = [
  { id: "attending_lecture", label: "Attending Lecture" },
  { id: "exercise", label: "Exercise" },
  { id: "relaxing", label: "Relaxing" },
  { id: "in_vehicle", label: "In Vehicle" },
  { id: "cycling", label: "Cycling" },
  { id: "walking", label: "Walking" },
  { id: "running", label: "Running" },
  { id: "studying", label: "Studying" },
  { id: "eating", label: "Eating" },
  { id: "standing", label: "Standing" },
];

export const SOCIAL_OPTIONS: ReadonlyArray<{ id: string; label: string }> = [
  { id: "alone", label: "Alone" },
  { id: "with_someone_conversing", label: "With someone, talking" },
  { id: "with_someone_not_conversing", label: "With someone, not talking" },
];

export const RESPONSE_OPTIONS: ReadonlyArray<{ id: ResponseToken; label: string }> = [
  { id: "yes", label: "Yes" },
  { id: "no", label: "No" },
  { id: "not_feasible_now", label: "Yes, but not feasible right now" },
];
