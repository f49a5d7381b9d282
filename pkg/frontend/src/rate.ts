/**
 * Local mirror of profile validation and the design-rate formula.
 *
 * This is the only numeric computation the studio performs itself (for
 * instant feedback while editing); everything else comes from the service.
 * It must agree with the service rate to 1e-6 (covered by tests).
 */
import type { Profile, Term } from "./types.js";

const WEIGHT_SUM_TOL = 1e-9;

export function validateProfile(profile: Profile): string[] {
  const violations: string[] = [];
  const polys: [string, Term[]][] = [["lambda", profile.lambda], ["rho", profile.rho]];
  for (const [name, terms] of polys) {
    if (terms.length === 0) {
      violations.push(`${name}: no terms`);
      continue;
    }
    const degrees = new Set<number>();
    let total = 0;
    for (const t of terms) {
      if (!Number.isInteger(t.degree) || t.degree < 1) {
        violations.push(`${name}: degree ${t.degree} < 1`);
      }
      if (degrees.has(t.degree)) {
        violations.push(`${name}: duplicate degrees`);
      }
      degrees.add(t.degree);
      if (t.weight < 0) {
        violations.push(`${name}: negative weight ${t.weight} at degree ${t.degree}`);
      }
      if (name === "lambda" && profile.perspective === "edge" && t.degree < 2 && t.weight > 0) {
        violations.push(`lambda: degree ${t.degree} < 2 not allowed in edge perspective`);
      }
      total += t.weight;
    }
    if (Math.abs(total - 1.0) > WEIGHT_SUM_TOL) {
      violations.push(`${name}: weights sum to ${total.toPrecision(10)}`);
    }
  }
  if (violations.length === 0) {
    const r = rateUnchecked(profile);
    if (!(r > 0 && r < 1)) {
      violations.push(`design rate ${r.toPrecision(6)} outside (0, 1)`);
    }
  }
  return violations;
}

function edgeFractionSum(terms: Term[]): number {
  return terms.reduce((acc, t) => acc + t.weight / t.degree, 0);
}

function rateUnchecked(profile: Profile): number {
  return 1.0 - edgeFractionSum(profile.rho) / edgeFractionSum(profile.lambda);
}

/** R = 1 - (sum rho_j/j)/(sum lambda_i/i); profile must be edge-perspective and valid. */
export function designRate(profile: Profile): number {
  if (profile.perspective !== "edge") {
    throw new Error("design rate needs an edge-perspective profile");
  }
  const violations = validateProfile(profile);
  if (violations.length > 0) {
    throw new Error(`invalid profile: ${violations.join("; ")}`);
  }
  return rateUnchecked(profile);
}
