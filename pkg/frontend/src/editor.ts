/**
 * Degree-profile draft editing with undo and a rate-preserving rebalance.
 *
 * Every mutation snapshots the previous draft, so undo restores it exactly.
 * The rebalance solves for the chosen degree's weight w such that, with the
 * remaining weights scaled to fill 1 - w, the design rate hits the target:
 * both the weight-sum and rate constraints in one closed-form step.
 */
import { designRate, validateProfile } from "./rate.js";
import type { Profile, Term } from "./types.js";

export type PolySide = "lambda" | "rho";

function cloneProfile(p: Profile): Profile {
  return {
    perspective: p.perspective,
    lambda: p.lambda.map((t) => ({ ...t })),
    rho: p.rho.map((t) => ({ ...t })),
  };
}

function sortTerms(terms: Term[]): void {
  terms.sort((a, b) => a.degree - b.degree);
}

export class ProfileEditor {
  private draft: Profile;
  private history: Profile[] = [];
  readonly targetRate: number;

  constructor(profile: Profile, targetRate?: number) {
    this.draft = cloneProfile(profile);
    this.targetRate = targetRate ?? designRate(profile);
  }

  get profile(): Profile {
    return cloneProfile(this.draft);
  }

  get violations(): string[] {
    return validateProfile(this.draft);
  }

  /** Live design rate, or null while the draft is invalid. */
  get rate(): number | null {
    try {
      return designRate(this.draft);
    } catch {
      return null;
    }
  }

  get canSubmit(): boolean {
    return this.violations.length === 0;
  }

  get canUndo(): boolean {
    return this.history.length > 0;
  }

  private terms(side: PolySide): Term[] {
    return side === "lambda" ? this.draft.lambda : this.draft.rho;
  }

  private snapshot(): void {
    this.history.push(cloneProfile(this.draft));
  }

  undo(): boolean {
    const prev = this.history.pop();
    if (!prev) return false;
    this.draft = prev;
    return true;
  }

  addTerm(side: PolySide, degree: number, weight = 0): void {
    const terms = this.terms(side);
    if (terms.some((t) => t.degree === degree)) {
      throw new Error(`degree ${degree} already present in ${side}`);
    }
    this.snapshot();
    terms.push({ degree, weight });
    sortTerms(terms);
  }

  removeTerm(side: PolySide, degree: number): void {
    const terms = this.terms(side);
    const idx = terms.findIndex((t) => t.degree === degree);
    if (idx < 0) throw new Error(`no degree ${degree} in ${side}`);
    this.snapshot();
    terms.splice(idx, 1);
  }

  setWeight(side: PolySide, degree: number, weight: number): void {
    const term = this.terms(side).find((t) => t.degree === degree);
    if (!term) throw new Error(`no degree ${degree} in ${side}`);
    this.snapshot();
    term.weight = weight;
  }

  setDegree(side: PolySide, from: number, to: number): void {
    const terms = this.terms(side);
    const term = terms.find((t) => t.degree === from);
    if (!term) throw new Error(`no degree ${from} in ${side}`);
    if (terms.some((t) => t.degree === to)) {
      throw new Error(`degree ${to} already present in ${side}`);
    }
    this.snapshot();
    term.degree = to;
    sortTerms(terms);
  }

  /** Scale the side's weights so they sum to one (shape preserved). */
  renormalize(side: PolySide): void {
    const terms = this.terms(side);
    const total = terms.reduce((a, t) => a + t.weight, 0);
    if (total <= 0) throw new Error(`cannot renormalize ${side}: total <= 0`);
    this.snapshot();
    for (const t of terms) t.weight /= total;
  }

  /**
   * Set the chosen degree's weight (and proportionally rescale the others)
   * so the design rate returns to the target.  Throws when the target is
   * unreachable with a weight in [0, 1].
   */
  rebalance(side: PolySide, degree: number): void {
    const work = cloneProfile(this.draft);
    const terms = side === "lambda" ? work.lambda : work.rho;
    if (!terms.some((t) => t.degree === degree)) {
      terms.push({ degree, weight: 0 });
      sortTerms(terms);
    }
    const others = terms.filter((t) => t.degree !== degree);
    const othersWeight = others.reduce((a, t) => a + t.weight, 0);
    if (othersWeight <= 0) {
      throw new Error("rebalance needs at least one other weighted term");
    }
    const othersFrac = others.reduce((a, t) => a + t.weight / t.degree, 0) / othersWeight;

    // required edge-fraction integral of this side for the target rate
    const lamInt = work.lambda.reduce((a, t) => a + t.weight / t.degree, 0);
    const rhoInt = work.rho.reduce((a, t) => a + t.weight / t.degree, 0);
    const needed = side === "lambda"
      ? rhoInt / (1 - this.targetRate)
      : (1 - this.targetRate) * lamInt;

    const chosen = terms.find((t) => t.degree === degree)!;
    const denom = 1 / degree - othersFrac;
    if (Math.abs(denom) < 1e-15) {
      throw new Error("chosen degree cannot move the rate (same mean degree)");
    }
    const w = (needed - othersFrac) / denom;
    if (!(w >= -1e-12 && w <= 1 + 1e-12)) {
      throw new Error(`rate ${this.targetRate} unreachable via degree ${degree} ` +
        `(needs weight ${w.toFixed(4)})`);
    }
    const clamped = Math.min(Math.max(w, 0), 1);
    const scale = (1 - clamped) / othersWeight;
    this.snapshot();
    const draftTerms = this.terms(side);
    draftTerms.length = 0;
    for (const t of others) draftTerms.push({ degree: t.degree, weight: t.weight * scale });
    draftTerms.push({ degree, weight: clamped });
    sortTerms(draftTerms);
  }
}
