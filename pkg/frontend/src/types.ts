// Artifact document shapes served by the lesson API. Times are integer
// milliseconds everywhere; the UI renders seconds.

export interface LessonRecord {
  lesson_id: string;
  title: string;
  duration_ms: number;
  created_at: string;
  media_url: string | null;
  manifest: Record<string, { path: string; sha256: string }>;
}

export interface LessonList {
  lessons: LessonRecord[];
}

export interface TranscriptTurnDoc {
  start_ms: number;
  end_ms: number;
  speaker: 'TEACHER' | 'STUDENT' | 'UNKNOWN';
  text: string;
  words?: [string, number][];
}

export interface CaptionDoc {
  start_ms: number;
  end_ms: number;
  segment_index: number;
  caption: string;
}

export interface TimelineDoc {
  schema_version: number;
  lesson_id: string;
  duration_ms: number;
  turns: TranscriptTurnDoc[];
  captions: CaptionDoc[];
}

export interface FeedbackItemDoc {
  feedback_id: string;
  dimension_id: string;
  start_ms: number;
  end_ms: number;
  polarity: 'STRENGTH' | 'WEAKNESS';
  content: string;
  observed_behaviors: string;
  actionable_advice: string;
  guidelines: string[];
  validation: { consistent: boolean; rationale: string } | null;
  status: 'VALIDATED' | 'REJECTED' | null;
}

export interface FeedbackDoc {
  schema_version: number;
  lesson_id: string;
  rubric_id: string;
  generated_at: string;
  items: FeedbackItemDoc[];
  rejected: FeedbackItemDoc[];
}

export interface ActivitySpanDoc {
  start_ms: number;
  end_ms: number;
  labels: string[];
}

export interface QuestionDoc {
  start_ms: number;
  end_ms: number;
  text: string;
  bloom: number;
  justification: string;
}

export interface OutlineSectionDoc {
  start_ms: number;
  end_ms: number;
  heading: string;
  summary: string;
}

export interface AnnotationsDoc {
  schema_version: number;
  lesson_id: string;
  activities: ActivitySpanDoc[];
  questions: QuestionDoc[];
  bloom_histogram: Record<string, number>;
  outline: OutlineSectionDoc[];
}

export interface RecommendationEntryDoc {
  feedback_id: string;
  query: string;
  results: { clip_id: string; score: number; explanation: string }[];
}

export interface RecommendationsDoc {
  schema_version: number;
  lesson_id: string;
  entries: RecommendationEntryDoc[];
}

export interface EvaluationDoc {
  schema_version: number;
  lesson_id: string;
  temporal_coverage: { k: number; p: number[]; entropy_nats: number; normalized: number } | null;
  grounding_rate: number | null;
  question_scores: { precision: number; recall: number; f1: number } | null;
  activity_scores: {
    overall: { micro_f1: number };
    teacher: { micro_f1: number } | null;
    student: { micro_f1: number } | null;
  } | null;
  diarization_jer: number | null;
}

export interface JobDoc {
  job_id: string;
  lesson_id: string;
  stage: string;
  state: 'QUEUED' | 'RUNNING' | 'DONE' | 'FAILED';
  error: string | null;
}

export type ActiveTab = 'timeline' | 'questions' | 'feedback' | 'outline' | 'transcript';

// UI state: everything the view derives beyond the fetched artifacts.
export interface ViewState {
  lessonId: string;
  currentTimeMs: number;
  durationMs: number;
  activeTab: ActiveTab;
  dimensionFilter: string | null;
}
