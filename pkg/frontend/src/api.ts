// Read-only client for the lesson service. The dashboard never mutates
// artifacts; every view derives from these GETs plus local ViewState.

import type {
  AnnotationsDoc,
  EvaluationDoc,
  FeedbackDoc,
  LessonList,
  LessonRecord,
  RecommendationsDoc,
  TimelineDoc,
} from './types.js';

export class ApiError extends Error {
  constructor(
    public status: number,
    public errorType: string,
    message: string,
  ) {
    super(message);
  }
}

async function getJson<T>(url: string, token?: string): Promise<T> {
  const headers: Record<string, string> = { Accept: 'application/json' };
  if (token) {
    headers['Authorization'] = `Bearer ${token}`;
  }
  const res = await fetch(url, { headers });
  if (!res.ok) {
    let errorType = 'HttpError';
    let message = `HTTP ${res.status}`;
    try {
      const body = (await res.json()) as { error?: { type: string; message: string } };
      if (body.error) {
        errorType = body.error.type;
        message = body.error.message;
      }
    } catch {
      // non-JSON error body; keep the generic message
    }
    throw new ApiError(res.status, errorType, message);
  }
  return (await res.json()) as T;
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private token?: string,
  ) {
    this.baseUrl = baseUrl.replace(/\/$/, '');
  }

  lessons(): Promise<LessonList> {
    return getJson<LessonList>(`${this.baseUrl}/api/lessons`, this.token);
  }

  lesson(id: string): Promise<LessonRecord> {
    return getJson<LessonRecord>(`${this.baseUrl}/api/lessons/${id}`, this.token);
  }

  timeline(id: string): Promise<TimelineDoc> {
    return getJson<TimelineDoc>(`${this.baseUrl}/api/lessons/${id}/timeline`, this.token);
  }

  feedback(id: string, dimension?: string): Promise<FeedbackDoc> {
    const suffix = dimension ? `?dimension=${encodeURIComponent(dimension)}` : '';
    return getJson<FeedbackDoc>(`${this.baseUrl}/api/lessons/${id}/feedback${suffix}`, this.token);
  }

  annotations(id: string): Promise<AnnotationsDoc> {
    return getJson<AnnotationsDoc>(`${this.baseUrl}/api/lessons/${id}/annotations`, this.token);
  }

  recommendations(id: string): Promise<RecommendationsDoc> {
    return getJson<RecommendationsDoc>(
      `${this.baseUrl}/api/lessons/${id}/recommendations`,
      this.token,
    );
  }

  evaluation(id: string): Promise<EvaluationDoc> {
    return getJson<EvaluationDoc>(`${this.baseUrl}/api/lessons/${id}/evaluation`, this.token);
  }

  /** Null when the artifact has not been generated yet (404). */
  async optional<T>(load: () => Promise<T>): Promise<T | null> {
    try {
      return await load();
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) {
        return null;
      }
      throw err;
    }
  }
}
