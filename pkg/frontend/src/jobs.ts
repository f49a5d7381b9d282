/**
 * Job polling: launch, watch progress, cancel, survive connection loss.
 *
 * Connection failures do not abort the watch; the card shows a disconnected
 * state and polling retries with backoff until the job settles.
 */
import type { ApiClient } from "./api.js";
import type { JobKind, JobOut, JobStatus } from "./types.js";

export interface JobCardState {
  job: JobOut | null;
  connected: boolean;
  attempts: number;
}

export type JobUpdate = (state: JobCardState) => void;

const TERMINAL: JobStatus[] = ["done", "failed", "cancelled"];

export function isTerminal(status: JobStatus): boolean {
  return TERMINAL.includes(status);
}

export interface JobWatch {
  id: string;
  done: Promise<JobOut>;
  cancel: () => Promise<void>;
}

export function watchJob(api: ApiClient, id: string, onUpdate?: JobUpdate,
                         pollMs = 400, maxBackoffMs = 5000,
                         sleep: (ms: number) => Promise<void> = defaultSleep): JobWatch {
  let cancelled = false;
  const state: JobCardState = { job: null, connected: true, attempts: 0 };

  const done = (async (): Promise<JobOut> => {
    let backoff = pollMs;
    for (;;) {
      try {
        const job = await api.getJob(id);
        state.job = job;
        state.connected = true;
        state.attempts = 0;
        backoff = pollMs;
        onUpdate?.({ ...state });
        if (isTerminal(job.status)) return job;
      } catch (err) {
        state.connected = false;
        state.attempts += 1;
        onUpdate?.({ ...state });
        backoff = Math.min(backoff * 2, maxBackoffMs);
      }
      await sleep(backoff);
      if (cancelled && state.job && isTerminal(state.job.status)) return state.job;
    }
  })();

  return {
    id,
    done,
    cancel: async () => {
      cancelled = true;
      await api.cancelJob(id);
    },
  };
}

export async function launchJob(api: ApiClient, kind: JobKind,
                                params: Record<string, unknown>,
                                onUpdate?: JobUpdate, pollMs = 400,
                                sleep?: (ms: number) => Promise<void>): Promise<JobWatch> {
  const job = await api.submitJob(kind, params);
  onUpdate?.({ job, connected: true, attempts: 0 });
  return watchJob(api, job.id, onUpdate, pollMs, 5000, sleep ?? defaultSleep);
}

function defaultSleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}
