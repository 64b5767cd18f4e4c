// Bootstrap: pick a lesson, load its artifacts, wire tabs and the player.

import { ApiClient } from './api.js';
import type { MediaPlayer } from './player.js';
import { renderApp, renderErrorState, type LoadedLesson } from './render.js';
import type { ActiveTab, ViewState } from './types.js';
import { createViewState } from './viewmodel.js';

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get('api') ?? 'http://127.0.0.1:8765';
const client = new ApiClient(baseUrl, params.get('token') ?? undefined);

const root = document.getElementById('app') as HTMLElement;
const picker = document.getElementById('lesson-picker') as HTMLSelectElement;
const video = document.getElementById('player') as HTMLVideoElement;

let state: ViewState | null = null;
let data: LoadedLesson | null = null;

async function loadLessonList(): Promise<void> {
  try {
    const { lessons } = await client.lessons();
    picker.replaceChildren(new Option('— pick a lesson —', ''));
    for (const lesson of lessons) {
      picker.append(new Option(`${lesson.title} (${lesson.lesson_id})`, lesson.lesson_id));
    }
    const preselected = params.get('lesson');
    if (preselected && lessons.some((l) => l.lesson_id === preselected)) {
      picker.value = preselected;
      await loadLesson(preselected);
    }
  } catch (err) {
    renderErrorState(root, `could not list lessons from ${baseUrl}: ${String(err)}`, loadLessonList);
  }
}

async function loadLesson(lessonId: string): Promise<void> {
  try {
    const record = await client.lesson(lessonId);
    data = {
      record,
      timeline: await client.optional(() => client.timeline(lessonId)),
      annotations: await client.optional(() => client.annotations(lessonId)),
      feedback: await client.optional(() => client.feedback(lessonId)),
      recommendations: await client.optional(() => client.recommendations(lessonId)),
    };
    state = createViewState(lessonId, record.duration_ms);
    if (record.media_url) {
      video.src = record.media_url;
      video.hidden = false;
    } else {
      video.removeAttribute('src');
      video.hidden = true;
    }
    rerender();
  } catch (err) {
    renderErrorState(root, `could not load lesson ${lessonId}: ${String(err)}`, () =>
      loadLesson(lessonId),
    );
  }
}

function player(): MediaPlayer | null {
  return data?.record.media_url ? video : null;
}

function rerender(): void {
  if (state === null || data === null) {
    return;
  }
  renderApp(root, {
    state,
    data,
    player: player(),
    onTabChange: (tab: ActiveTab) => {
      state = { ...state!, activeTab: tab };
      rerender();
    },
    onDimensionFilter: (dimension: string | null) => {
      state = { ...state!, dimensionFilter: dimension };
      rerender();
    },
  });
}

picker.addEventListener('change', () => {
  if (picker.value) {
    void loadLesson(picker.value);
  }
});

void loadLessonList();
