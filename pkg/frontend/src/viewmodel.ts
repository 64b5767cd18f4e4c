// Pure view-model layer: every list the DOM renders is computed here 1:1,
// so tests on these functions pin the rendered counts to artifact contents.

import type {
  ActivitySpanDoc,
  AnnotationsDoc,
  FeedbackDoc,
  FeedbackItemDoc,
  OutlineSectionDoc,
  TimelineDoc,
  ViewState,
} from './types.js';

export const BLOOM_NAMES: Record<number, string> = {
  1: 'Remember',
  2: 'Understand',
  3: 'Apply',
  4: 'Analyze',
  5: 'Evaluate',
  6: 'Create',
};

// Hover descriptions for the default activity code set; unknown codes fall
// back to a prettified code so custom taxonomies still render.
export const CODE_DESCRIPTIONS: Record<string, string> = {
  TEACHER_LECTURING: 'Teacher presents content to the whole class.',
  TEACHER_WRITING: 'Teacher writes or draws on the board or a shared display.',
  TEACHER_QA: 'Teacher poses questions to students or responds to student questions.',
  TEACHER_ONE_ON_ONE: 'Teacher works with an individual student or a single group.',
  STUDENT_LISTENING: 'Students listen to the teacher or to a presenting peer.',
  STUDENT_GROUP_WORK: 'Students work together in small groups on a task.',
  STUDENT_QA: 'Students answer or ask questions in whole-class exchange.',
  STUDENT_PRESENTING: 'A student or group presents work to the class.',
};

export function describeCode(code: string): string {
  const known = CODE_DESCRIPTIONS[code];
  if (known) {
    return known;
  }
  return code.toLowerCase().replace(/_/g, ' ');
}

export function formatClock(ms: number): string {
  const totalSeconds = Math.floor(ms / 1000);
  const minutes = Math.floor(totalSeconds / 60);
  const seconds = totalSeconds % 60;
  return `${minutes.toString().padStart(2, '0')}:${seconds.toString().padStart(2, '0')}`;
}

export function createViewState(lessonId: string, durationMs: number): ViewState {
  return {
    lessonId,
    currentTimeMs: 0,
    durationMs,
    activeTab: 'timeline',
    dimensionFilter: null,
  };
}

export function withCurrentTime(state: ViewState, timeMs: number): ViewState {
  const clamped = Math.min(Math.max(timeMs, 0), state.durationMs);
  return { ...state, currentTimeMs: clamped };
}

// -- timeline tab -------------------------------------------------------

export interface BandSegment {
  startMs: number;
  endMs: number;
  leftPct: number;
  widthPct: number;
}

export interface ActivityBand {
  code: string;
  actor: 'TEACHER' | 'STUDENT';
  description: string;
  segments: BandSegment[];
}

export function activityBands(
  activities: ActivitySpanDoc[],
  durationMs: number,
): ActivityBand[] {
  const byCode = new Map<string, BandSegment[]>();
  for (const span of activities) {
    for (const code of span.labels) {
      const segment: BandSegment = {
        startMs: span.start_ms,
        endMs: span.end_ms,
        leftPct: (span.start_ms / durationMs) * 100,
        widthPct: ((span.end_ms - span.start_ms) / durationMs) * 100,
      };
      const list = byCode.get(code);
      if (list) {
        list.push(segment);
      } else {
        byCode.set(code, [segment]);
      }
    }
  }
  const bands: ActivityBand[] = [];
  for (const code of [...byCode.keys()].sort()) {
    bands.push({
      code,
      actor: code.startsWith('STUDENT_') ? 'STUDENT' : 'TEACHER',
      description: describeCode(code),
      segments: byCode.get(code) ?? [],
    });
  }
  return bands;
}

export function totalActivitySpans(bands: ActivityBand[]): number {
  return bands.reduce((sum, band) => sum + band.segments.length, 0);
}

// -- questions tab -------------------------------------------------------

export interface BloomBar {
  level: number;
  name: string;
  count: number;
  barPct: number;
}

export function bloomChart(histogram: Record<string, number>): BloomBar[] {
  const counts = [1, 2, 3, 4, 5, 6].map((level) => histogram[String(level)] ?? 0);
  const max = Math.max(1, ...counts);
  return counts.map((count, i) => ({
    level: i + 1,
    name: BLOOM_NAMES[i + 1] ?? String(i + 1),
    count,
    barPct: (count / max) * 100,
  }));
}

export function questionsPerLevel(annotations: AnnotationsDoc): Record<number, number> {
  const out: Record<number, number> = { 1: 0, 2: 0, 3: 0, 4: 0, 5: 0, 6: 0 };
  for (const question of annotations.questions) {
    out[question.bloom] = (out[question.bloom] ?? 0) + 1;
  }
  return out;
}

// -- feedback tab --------------------------------------------------------

export interface FeedbackCard {
  id: string;
  dimensionId: string;
  polarity: 'STRENGTH' | 'WEAKNESS';
  startMs: number;
  endMs: number;
  summary: string;
  content: string;
  observed: string;
  advice: string;
  guidelines: string[];
}

function toCard(item: FeedbackItemDoc): FeedbackCard {
  const firstSentence = item.content.split(/(?<=[.!?])\s/)[0] ?? item.content;
  return {
    id: item.feedback_id,
    dimensionId: item.dimension_id,
    polarity: item.polarity,
    startMs: item.start_ms,
    endMs: item.end_ms,
    summary: firstSentence,
    content: item.content,
    observed: item.observed_behaviors,
    advice: item.actionable_advice,
    guidelines: item.guidelines,
  };
}

/** Cards in artifact order (strengths first, then by time), optionally
 * filtered to one rubric dimension. */
export function feedbackCards(feedback: FeedbackDoc, dimensionFilter: string | null): FeedbackCard[] {
  return feedback.items
    .filter((item) => dimensionFilter === null || item.dimension_id === dimensionFilter)
    .map(toCard);
}

export function dimensionsPresent(feedback: FeedbackDoc): string[] {
  return [...new Set(feedback.items.map((item) => item.dimension_id))].sort();
}

// -- outline / transcript --------------------------------------------------

export interface OutlineRow {
  startMs: number;
  endMs: number;
  heading: string;
  summary: string;
  clock: string;
}

export function outlineRows(outline: OutlineSectionDoc[]): OutlineRow[] {
  return outline.map((section) => ({
    startMs: section.start_ms,
    endMs: section.end_ms,
    heading: section.heading,
    summary: section.summary,
    clock: formatClock(section.start_ms),
  }));
}

export interface TranscriptRow {
  startMs: number;
  speaker: string;
  clock: string;
  text: string;
}

export function transcriptRows(timeline: TimelineDoc): TranscriptRow[] {
  return timeline.turns.map((turn) => ({
    startMs: turn.start_ms,
    speaker: turn.speaker,
    clock: formatClock(turn.start_ms),
    text: turn.text,
  }));
}

// -- acceptance-facing counts ---------------------------------------------

export interface RenderCounts {
  activitySpans: number;
  questions: number;
  questionsPerLevel: Record<number, number>;
  feedbackCards: number;
  outlineSections: number;
  transcriptTurns: number;
}

/** The exact counts the DOM renders; asserted against artifact contents.
 * Activity spans count artifact entries; the band layout may split a
 * multi-label span across per-code rows without changing this count. */
export function renderCounts(
  timeline: TimelineDoc,
  annotations: AnnotationsDoc,
  feedback: FeedbackDoc,
): RenderCounts {
  return {
    activitySpans: annotations.activities.length,
    questions: annotations.questions.length,
    questionsPerLevel: questionsPerLevel(annotations),
    feedbackCards: feedbackCards(feedback, null).length,
    outlineSections: outlineRows(annotations.outline).length,
    transcriptTurns: transcriptRows(timeline).length,
  };
}
