// Seek handling: clicking any timestamped element moves the player to the
// element's start. Only the currentTime/duration surface of the media
// element is used, so tests can drive a plain object.

export interface MediaPlayer {
  currentTime: number; // seconds
  duration: number; // seconds; NaN until metadata loads
}

export interface SeekResult {
  requestedS: number;
  appliedS: number;
  clamped: boolean;
}

export const SEEK_TOLERANCE_S = 0.5;

/** Seek to an element's start, clamping corrupt out-of-range timestamps
 * into the lesson. Returns what happened so the UI can warn on clamps. */
export function seekTo(player: MediaPlayer, startMs: number, durationMs: number): SeekResult {
  const requestedS = startMs / 1000;
  const durationS = durationMs / 1000;
  let appliedS = requestedS;
  let clamped = false;
  if (requestedS < 0) {
    appliedS = 0;
    clamped = true;
  } else if (requestedS > durationS) {
    appliedS = durationS;
    clamped = true;
  }
  player.currentTime = appliedS;
  return { requestedS, appliedS, clamped };
}

export function seekIsAccurate(player: MediaPlayer, startMs: number): boolean {
  return Math.abs(player.currentTime - startMs / 1000) <= SEEK_TOLERANCE_S;
}
