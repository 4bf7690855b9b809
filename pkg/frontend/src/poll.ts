import type { Api, JobJson } from "./api.js";

export interface PollHandle {
  done: Promise<JobJson>;
  cancel(): void;
}

/**
 * Poll a job until it leaves the queue. The UI never blocks: callers get
 * progress ticks for a spinner and a cancel() that also cancels the job
 * server-side.
 */
export function pollJob(
  api: Api,
  jobId: string,
  intervalMs = 1000,
  onTick?: (job: JobJson) => void,
): PollHandle {
  let timer: ReturnType<typeof setTimeout> | null = null;
  let cancelled = false;
  let resolveDone: (job: JobJson) => void;
  let rejectDone: (err: unknown) => void;
  const done = new Promise<JobJson>((resolve, reject) => {
    resolveDone = resolve;
    rejectDone = reject;
  });

  const step = async () => {
    try {
      const job = await api.getJob(jobId);
      if (onTick) onTick(job);
      if (job.state === "done" || job.state === "cancelled") {
        resolveDone(job);
        return;
      }
    } catch (err) {
      rejectDone(err);
      return;
    }
    if (!cancelled) {
      timer = setTimeout(step, intervalMs);
    }
  };
  void step();

  return {
    done,
    cancel() {
      cancelled = true;
      if (timer !== null) clearTimeout(timer);
      void api.cancelJob(jobId).catch(() => undefined);
    },
  };
}
