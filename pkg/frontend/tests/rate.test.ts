import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { designRate, validateProfile } from "../src/rate.js";
import type { Profile } from "../src/types.js";

const fixtures: Record<string, { profile: Profile; design_rate: number }> =
  JSON.parse(readFileSync(new URL("./fixtures.json", import.meta.url), "utf-8"));

describe("local design rate", () => {
  it("matches the service rate within 1e-6 for every fixture profile", () => {
    for (const [name, { profile, design_rate }] of Object.entries(fixtures)) {
      const local = designRate(profile);
      expect(Math.abs(local - design_rate), name).toBeLessThanOrEqual(1e-6);
    }
  });

  it("computes the regular-code rate exactly", () => {
    const reg: Profile = {
      perspective: "edge",
      lambda: [{ degree: 3, weight: 1 }],
      rho: [{ degree: 6, weight: 1 }],
    };
    expect(designRate(reg)).toBeCloseTo(0.5, 12);
  });

  it("rejects node-perspective input", () => {
    const p: Profile = {
      perspective: "node",
      lambda: [{ degree: 3, weight: 1 }],
      rho: [{ degree: 6, weight: 1 }],
    };
    expect(() => designRate(p)).toThrow(/edge-perspective/);
  });
});

describe("validation", () => {
  it("accepts all fixtures", () => {
    for (const { profile } of Object.values(fixtures)) {
      expect(validateProfile(profile)).toEqual([]);
    }
  });

  it("flags a bad weight sum", () => {
    const p: Profile = {
      perspective: "edge",
      lambda: [{ degree: 2, weight: 0.5 }, { degree: 3, weight: 0.4 }],
      rho: [{ degree: 6, weight: 1 }],
    };
    expect(validateProfile(p).some((v) => v.includes("sum"))).toBe(true);
  });

  it("flags negative weights and duplicate degrees", () => {
    const p: Profile = {
      perspective: "edge",
      lambda: [{ degree: 2, weight: 1.1 }, { degree: 2, weight: -0.1 }],
      rho: [{ degree: 6, weight: 1 }],
    };
    const v = validateProfile(p);
    expect(v.some((x) => x.includes("negative"))).toBe(true);
    expect(v.some((x) => x.includes("duplicate"))).toBe(true);
  });
});
