/** Pure view-model helpers: form validation mirroring the server rules and
 * derivations of chart-ready structures from campaign documents. */

import type { CampaignDoc, PointDoc, SpaceDoc } from "./api.js";

export interface SpaceFormErrors {
  fieldErrors: Map<string, string>; // field key -> message, rendered inline
  formError: string | null;
}

/** Client-side mirror of the server's space validation; the server remains
 * authoritative (its 400s are rendered at the offending field). */
export function validateSpaceForm(space: SpaceDoc): SpaceFormErrors {
  const fieldErrors = new Map<string, string>();
  let formError: string | null = null;
  const names = new Set<string>();
  space.categoricals.forEach((v, i) => {
    const key = `cat-${i}`;
    if (!v.name.trim()) fieldErrors.set(`${key}-name`, "name required");
    else if (names.has(v.name)) fieldErrors.set(`${key}-name`, "duplicate name");
    names.add(v.name);
    const labels = v.levels.map((l) => l.trim()).filter((l) => l.length > 0);
    if (labels.length < 2) fieldErrors.set(`${key}-levels`, "need at least 2 levels");
    else if (new Set(labels).size !== labels.length) fieldErrors.set(`${key}-levels`, "levels must be unique");
  });
  space.continuous.forEach((v, i) => {
    const key = `con-${i}`;
    if (!v.name.trim()) fieldErrors.set(`${key}-name`, "name required");
    else if (names.has(v.name)) fieldErrors.set(`${key}-name`, "duplicate name");
    names.add(v.name);
    if (!Number.isFinite(v.lower) || !Number.isFinite(v.upper)) {
      fieldErrors.set(`${key}-bounds`, "bounds must be numbers");
    } else if (!(v.lower < v.upper)) {
      fieldErrors.set(`${key}-bounds`, "lower must be < upper");
    }
  });
  if (space.categoricals.length + space.continuous.length === 0) {
    formError = "add at least one variable";
  }
  return { fieldErrors, formError };
}

export function spaceFormValid(errors: SpaceFormErrors): boolean {
  return errors.fieldErrors.size === 0 && errors.formError === null;
}

/** Running-best series of told values; nondecreasing for maximize campaigns. */
export function incumbentSeries(doc: Pick<CampaignDoc, "history" | "config">): number[] {
  const sign = doc.config.direction === "minimize" ? -1 : 1;
  const out: number[] = [];
  let best = -Infinity;
  let bestRaw = NaN;
  for (const obs of doc.history) {
    if (sign * obs.y > best) {
      best = sign * obs.y;
      bestRaw = obs.y;
    }
    out.push(bestRaw);
  }
  return out;
}

export interface Stripe {
  iteration: number;
  levelIndex: number;
  label: string;
  y: number;
}

export interface Lane {
  varName: string;
  levels: string[];
  stripes: Stripe[];
}

/** One lane per categorical variable; one stripe per told observation. */
export function decisionPathLanes(doc: Pick<CampaignDoc, "history" | "space">): Lane[] {
  return doc.space.categoricals.map((variable, varIndex) => ({
    varName: variable.name,
    levels: variable.levels,
    stripes: doc.history.map((obs) => ({
      iteration: obs.iteration,
      levelIndex: obs.point.cat[varIndex],
      label: variable.levels[obs.point.cat[varIndex]] ?? `#${obs.point.cat[varIndex]}`,
      y: obs.y,
    })),
  }));
}

export function formatPoint(space: SpaceDoc, point: PointDoc): string {
  const parts: string[] = [];
  space.categoricals.forEach((v, i) => parts.push(`${v.name}=${v.levels[point.cat[i]] ?? point.cat[i]}`));
  space.continuous.forEach((v, i) => parts.push(`${v.name}=${round6(point.con[i])}`));
  return parts.join(", ");
}

function round6(x: number): string {
  return Number.isFinite(x) ? String(Math.round(x * 1e6) / 1e6) : String(x);
}

export interface CampaignView {
  spaceSummary: string;
  historyRows: { iteration: number; label: string; y: number; tag: string }[];
  incumbent: { label: string; y: number } | null;
  pending: { point: PointDoc; label: string; tag: string } | null;
  incumbentSeries: number[];
  lanes: Lane[];
  showDecisionPath: boolean;
  remainingInitial: PointDoc[];
  acq: { kind: string; xi: number; beta: number };
  direction: string;
}

/** Everything the campaign page renders, derived in one place from the
 * served document (no numbers are invented client-side). */
export function buildCampaignView(doc: CampaignDoc): CampaignView {
  const toldKeys = new Set(doc.history.map((o) => JSON.stringify(o.point)));
  const remaining = doc.initial_design.filter((p) => !toldKeys.has(JSON.stringify(p)));
  return {
    spaceSummary: `${doc.space.categoricals.length} categorical + ${doc.space.continuous.length} continuous`,
    historyRows: doc.history.map((o) => ({
      iteration: o.iteration,
      label: formatPoint(doc.space, o.point),
      y: o.y,
      tag: o.tag,
    })),
    incumbent:
      doc.incumbent === null
        ? null
        : { label: formatPoint(doc.space, doc.incumbent.point), y: doc.incumbent.y },
    pending:
      doc.pending === null
        ? null
        : { point: doc.pending.point, label: formatPoint(doc.space, doc.pending.point), tag: doc.pending.tag },
    incumbentSeries: incumbentSeries(doc),
    lanes: decisionPathLanes(doc),
    showDecisionPath: doc.space.categoricals.length > 0,
    remainingInitial: remaining,
    acq: doc.config.acq,
    direction: doc.config.direction,
  };
}
