// Wire types mirroring the session service; field names are the contract.

export type GambleKind = "end_point" | "adjacent";
export type FitMethod = "mle" | "bayes";
export type SessionMode = "end_point" | "adjacent" | "mixed";

export interface Gamble {
  id: string;
  c: number;
  p: number;
  prize_hi: number;
  prize_lo: number;
  kind: GambleKind;
}

export interface Progress {
  answered: number;
  total: number;
}

export interface UtilityPointWire {
  c: number;
  u: number;
  omega: number;
  disposition: "prone" | "neutral" | "averse";
  method: FitMethod | "adjusted";
  at_bound: boolean;
}

export interface CreateSessionRequest {
  c_grid: number[];
  p_grid: number[];
  mode: SessionMode;
  seed?: number;
  adjacent_p_grid?: number[] | null;
  method?: FitMethod;
  client_token?: string | null;
}

export interface CreateSessionResponse {
  session_id: string;
  created: boolean;
  gamble: Gamble | null;
  progress: Progress;
}

export interface NextResponse {
  complete: boolean;
  gamble?: Gamble | null;
  curve?: UtilityPointWire[];
  progress: Progress;
}

export interface AnswerResponse {
  recorded: boolean;
  progress: Progress;
}

export interface UtilityResponse {
  points: UtilityPointWire[];
  reason?: string;
}
