// DOM layer: maps view models to elements one-to-one. No state lives here;
// re-rendering from the same artifacts reproduces the identical view.

import { seekTo, type MediaPlayer } from './player.js';
import type {
  ActiveTab,
  AnnotationsDoc,
  FeedbackDoc,
  LessonRecord,
  RecommendationsDoc,
  TimelineDoc,
  ViewState,
} from './types.js';
import {
  activityBands,
  bloomChart,
  dimensionsPresent,
  feedbackCards,
  formatClock,
  outlineRows,
  transcriptRows,
} from './viewmodel.js';

export interface LoadedLesson {
  record: LessonRecord;
  timeline: TimelineDoc | null;
  annotations: AnnotationsDoc | null;
  feedback: FeedbackDoc | null;
  recommendations: RecommendationsDoc | null;
}

export interface RenderContext {
  state: ViewState;
  data: LoadedLesson;
  player: MediaPlayer | null;
  onTabChange: (tab: ActiveTab) => void;
  onDimensionFilter: (dimension: string | null) => void;
}

const TABS: ActiveTab[] = ['timeline', 'questions', 'feedback', 'outline', 'transcript'];

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function seekButton(ctx: RenderContext, startMs: number, label?: string): HTMLButtonElement {
  const button = el('button', 'seek', label ?? formatClock(startMs));
  if (ctx.player === null) {
    button.disabled = true;
    button.title = 'no media URL configured for this lesson';
  } else {
    button.addEventListener('click', () => {
      const result = seekTo(ctx.player!, startMs, ctx.state.durationMs);
      if (result.clamped) {
        console.warn(`seek clamped: ${result.requestedS}s -> ${result.appliedS}s`);
      }
    });
  }
  return button;
}

function notGenerated(which: string): HTMLElement {
  return el('p', 'empty-state', `${which} not generated yet — run the corresponding stage.`);
}

function errorBanner(message: string, retry: () => void): HTMLElement {
  const banner = el('div', 'banner error');
  banner.append(el('span', undefined, message));
  const button = el('button', undefined, 'Retry');
  button.addEventListener('click', retry);
  banner.append(button);
  return banner;
}

export function renderErrorState(root: HTMLElement, message: string, retry: () => void): void {
  root.replaceChildren(errorBanner(message, retry));
}

export function renderApp(root: HTMLElement, ctx: RenderContext): void {
  root.replaceChildren();
  root.append(renderHeader(ctx), renderTabBar(ctx), renderActivePanel(ctx));
}

function renderHeader(ctx: RenderContext): HTMLElement {
  const header = el('header');
  header.append(el('h1', undefined, ctx.data.record.title || ctx.data.record.lesson_id));
  header.append(
    el(
      'p',
      'meta',
      `lesson ${ctx.data.record.lesson_id} · ${formatClock(ctx.state.durationMs)} long`,
    ),
  );
  return header;
}

function renderTabBar(ctx: RenderContext): HTMLElement {
  const nav = el('nav', 'tabs');
  for (const tab of TABS) {
    const button = el('button', tab === ctx.state.activeTab ? 'tab active' : 'tab', tab);
    button.addEventListener('click', () => ctx.onTabChange(tab));
    nav.append(button);
  }
  return nav;
}

function renderActivePanel(ctx: RenderContext): HTMLElement {
  switch (ctx.state.activeTab) {
    case 'timeline':
      return renderTimelineTab(ctx);
    case 'questions':
      return renderQuestionsTab(ctx);
    case 'feedback':
      return renderFeedbackTab(ctx);
    case 'outline':
      return renderOutlineTab(ctx);
    case 'transcript':
      return renderTranscriptTab(ctx);
  }
}

function renderTimelineTab(ctx: RenderContext): HTMLElement {
  const panel = el('section', 'panel timeline');
  const annotations = ctx.data.annotations;
  if (annotations === null) {
    panel.append(notGenerated('Activity annotations'));
    return panel;
  }
  panel.append(
    el('p', 'meta', `${annotations.activities.length} activity spans`),
  );
  for (const band of activityBands(annotations.activities, ctx.state.durationMs)) {
    const row = el('div', `band actor-${band.actor.toLowerCase()}`);
    const label = el('span', 'band-label', band.code);
    label.title = band.description; // hover reveals the code's description
    row.append(label);
    const track = el('div', 'band-track');
    for (const segment of band.segments) {
      const block = el('div', 'band-segment');
      block.style.left = `${segment.leftPct}%`;
      block.style.width = `${Math.max(segment.widthPct, 0.4)}%`;
      block.title = `${band.code} ${formatClock(segment.startMs)}–${formatClock(segment.endMs)}`;
      block.addEventListener('click', () => {
        if (ctx.player) {
          seekTo(ctx.player, segment.startMs, ctx.state.durationMs);
        }
      });
      track.append(block);
    }
    row.append(track);
    panel.append(row);
  }
  return panel;
}

function renderQuestionsTab(ctx: RenderContext): HTMLElement {
  const panel = el('section', 'panel questions');
  const annotations = ctx.data.annotations;
  if (annotations === null) {
    panel.append(notGenerated('Question annotations'));
    return panel;
  }
  const chart = el('div', 'bloom-chart');
  for (const bar of bloomChart(annotations.bloom_histogram)) {
    const row = el('div', 'bloom-row');
    row.append(el('span', 'bloom-name', `${bar.level} ${bar.name}`));
    const track = el('div', 'bloom-track');
    const fill = el('div', 'bloom-fill');
    fill.style.width = `${bar.barPct}%`;
    track.append(fill);
    row.append(track, el('span', 'bloom-count', String(bar.count)));
    chart.append(row);
  }
  panel.append(chart);

  const list = el('ul', 'question-list');
  for (const question of annotations.questions) {
    const item = el('li', 'question');
    item.append(seekButton(ctx, question.start_ms));
    item.append(el('span', 'question-text', ` L${question.bloom} — ${question.text}`));
    item.append(el('p', 'justification', question.justification));
    list.append(item);
  }
  panel.append(list);
  return panel;
}

function renderFeedbackTab(ctx: RenderContext): HTMLElement {
  const panel = el('section', 'panel feedback');
  const feedback = ctx.data.feedback;
  if (feedback === null) {
    panel.append(notGenerated('Feedback'));
    return panel;
  }

  const filter = el('div', 'dimension-filter');
  filter.append(el('span', undefined, 'dimension: '));
  const select = el('select');
  select.append(new Option('all', ''));
  for (const dimension of dimensionsPresent(feedback)) {
    select.append(new Option(dimension, dimension));
  }
  select.value = ctx.state.dimensionFilter ?? '';
  select.addEventListener('change', () =>
    ctx.onDimensionFilter(select.value === '' ? null : select.value),
  );
  filter.append(select);
  panel.append(filter);

  const recommendationsById = new Map(
    (ctx.data.recommendations?.entries ?? []).map((entry) => [entry.feedback_id, entry]),
  );

  for (const card of feedbackCards(feedback, ctx.state.dimensionFilter)) {
    const details = el('details', `card ${card.polarity.toLowerCase()}`);
    const summary = el('summary');
    summary.append(seekButton(ctx, card.startMs));
    summary.append(
      el(
        'span',
        'card-title',
        ` ${card.polarity === 'STRENGTH' ? 'Strength' : 'Growth area'} · ${card.dimensionId} · ${card.summary}`,
      ),
    );
    details.append(summary);
    const body = el('div', 'card-body');
    body.append(el('p', 'content', card.content));
    body.append(el('p', 'observed', card.observed));
    body.append(el('p', 'advice', `Try next: ${card.advice}`));
    if (card.guidelines.length) {
      const list = el('ul', 'guidelines');
      for (const guideline of card.guidelines) {
        list.append(el('li', undefined, guideline));
      }
      body.append(list);
    }
    const recommendation = recommendationsById.get(card.id);
    if (recommendation && recommendation.results.length) {
      const clips = el('ul', 'clips');
      for (const result of recommendation.results) {
        clips.append(el('li', undefined, `${result.clip_id}: ${result.explanation}`));
      }
      body.append(el('p', 'clips-heading', 'Exemplar clips'), clips);
    }
    details.append(body);
    panel.append(details);
  }
  if (ctx.data.recommendations === null) {
    panel.append(notGenerated('Clip recommendations'));
  }
  return panel;
}

function renderOutlineTab(ctx: RenderContext): HTMLElement {
  const panel = el('section', 'panel outline');
  const annotations = ctx.data.annotations;
  if (annotations === null) {
    panel.append(notGenerated('Outline'));
    return panel;
  }
  const list = el('ol', 'outline-list');
  for (const row of outlineRows(annotations.outline)) {
    const item = el('li', 'outline-row');
    item.append(seekButton(ctx, row.startMs));
    item.append(el('strong', undefined, ` ${row.heading}`));
    item.append(el('p', undefined, row.summary));
    list.append(item);
  }
  panel.append(list);
  return panel;
}

function renderTranscriptTab(ctx: RenderContext): HTMLElement {
  const panel = el('section', 'panel transcript');
  const timeline = ctx.data.timeline;
  if (timeline === null) {
    panel.append(notGenerated('Timeline'));
    return panel;
  }
  const list = el('div', 'transcript-list');
  for (const row of transcriptRows(timeline)) {
    const line = el('div', `turn speaker-${row.speaker.toLowerCase()}`);
    line.append(seekButton(ctx, row.startMs));
    line.append(el('span', 'speaker', ` ${row.speaker} `));
    line.append(el('span', 'text', row.text));
    list.append(line);
  }
  panel.append(list);
  return panel;
}
