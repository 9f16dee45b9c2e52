// Workbench state: one store, updates serialized through a single queue.
// Slider values track the server: user edits go "pending" until the PATCH is
// acknowledged; a rejection reverts to the last acknowledged value and keeps
// the server's diagnostic for the tooltip.

export interface SliderState {
  path: string;
  min: number;
  max: number;
  ackValue: number;
  pendingValue: number | null;
  error: string | null;
}

export interface WorkbenchState {
  sessionId: string | null;
  status: string;
  step: number;
  sliders: Record<string, SliderState>;
  streamProblems: string[];
}

export type Action =
  | { kind: "session-created"; sessionId: string; sliders: SliderState[] }
  | { kind: "status"; status: string; step: number }
  | { kind: "slider-edit"; path: string; value: number }
  | { kind: "patch-acked"; path: string; value: number }
  | { kind: "patch-rejected"; path: string; detail: string }
  | { kind: "stream-problem"; problem: string }
  | { kind: "session-closed" };

export function initialState(): WorkbenchState {
  return { sessionId: null, status: "idle", step: 0, sliders: {}, streamProblems: [] };
}

export function reduce(state: WorkbenchState, action: Action): WorkbenchState {
  switch (action.kind) {
    case "session-created": {
      const sliders: Record<string, SliderState> = {};
      for (const s of action.sliders) sliders[s.path] = s;
      return { ...initialState(), sessionId: action.sessionId, sliders };
    }
    case "status":
      return { ...state, status: action.status, step: action.step };
    case "slider-edit": {
      const slider = state.sliders[action.path];
      if (!slider) return state;
      const pendingValue = Math.min(Math.max(action.value, slider.min), slider.max);
      return {
        ...state,
        sliders: {
          ...state.sliders,
          [action.path]: { ...slider, pendingValue, error: null },
        },
      };
    }
    case "patch-acked": {
      const slider = state.sliders[action.path];
      if (!slider) return state;
      return {
        ...state,
        sliders: {
          ...state.sliders,
          [action.path]: {
            ...slider,
            ackValue: action.value,
            pendingValue: null,
            error: null,
          },
        },
      };
    }
    case "patch-rejected": {
      const slider = state.sliders[action.path];
      if (!slider) return state;
      return {
        ...state,
        sliders: {
          ...state.sliders,
          [action.path]: { ...slider, pendingValue: null, error: action.detail },
        },
      };
    }
    case "stream-problem":
      return { ...state, streamProblems: [...state.streamProblems, action.problem] };
    case "session-closed":
      return { ...state, sessionId: null, status: "closed" };
  }
}

/** Serializes every update through one queue so renders observe a consistent store. */
export class Store {
  private state = initialState();
  private queue: Action[] = [];
  private draining = false;
  private listeners: ((s: WorkbenchState) => void)[] = [];

  get(): WorkbenchState {
    return this.state;
  }

  subscribe(fn: (s: WorkbenchState) => void): void {
    this.listeners.push(fn);
  }

  dispatch(action: Action): void {
    this.queue.push(action);
    if (this.draining) return;
    this.draining = true;
    while (this.queue.length > 0) {
      const next = this.queue.shift()!;
      this.state = reduce(this.state, next);
    }
    this.draining = false;
    for (const fn of this.listeners) fn(this.state);
  }
}
