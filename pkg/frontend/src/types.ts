export interface Problem {
  support_boundary: "left" | "right" | "top" | "bottom";
  support_length: number;
  support_start: number;
  load_boundary: "left" | "right" | "top" | "bottom";
  load_position: number;
  load_angle_deg: number;
  volume_target: number;
  height: number;
  width: number;
  seed: number | null;
}

export interface Observation {
  beta: number[];
  steps_left: number;
  design_variables: number[];
  volume: number;
  design_image?: number[][][];
  design_image_png?: string;
  strain_image?: number[][][];
  strain_image_png?: string;
  score?: number;
}

export interface SessionState {
  session_id: string;
  seed: number | null;
  problem: Problem;
  problem_id: string;
  mode: string;
  t: number;
  t_max: number;
  done: boolean;
  score: number;
  observation: Observation;
  reward?: number;
}

export interface LeaderboardEntry {
  player: string;
  problem_id: string;
  score: number;
  timestamp: number;
  session_id: string;
  episode: {
    problem: Problem;
    actions: number[][];
    reward: number;
  };
}

/** One bar defined on screen: endpoints in domain units plus thicknesses. */
export interface Placement {
  xa: number;
  ya: number;
  xb: number;
  yb: number;
  ta: number;
  tb: number;
}
