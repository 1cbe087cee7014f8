import { describe, expect, it } from "vitest";
import {
  GOALS,
  HORIZONS,
  LatestWins,
  METRICS,
  MODES,
  SOURCES,
  effectiveSource,
  formErrors,
  type QueryFormState,
} from "../src/state.js";
import { deferred } from "./helpers.js";

const VALID: QueryFormState = { goal: "learn", horizon: "short", category: null, topN: 10 };

describe("formErrors", () => {
  it("accepts every goal/horizon combination the API offers", () => {
    for (const goal of GOALS) {
      for (const horizon of HORIZONS) {
        expect(formErrors({ ...VALID, goal, horizon })).toEqual([]);
      }
    }
  });

  it("rejects an unknown goal", () => {
    const errors = formErrors({ ...VALID, goal: "acquire-venture-capital" });
    expect(errors).toHaveLength(1);
    expect(errors[0]).toContain("goal");
  });

  it("rejects an unknown horizon", () => {
    const errors = formErrors({ ...VALID, horizon: "eternal" });
    expect(errors).toHaveLength(1);
    expect(errors[0]).toContain("horizon");
  });

  it("rejects non-positive, fractional, and missing top_n", () => {
    for (const topN of [0, -3, 2.5, Number.NaN]) {
      const errors = formErrors({ ...VALID, topN });
      expect(errors).toHaveLength(1);
      expect(errors[0]).toContain("top_n");
    }
  });

  it("reports several problems at once", () => {
    expect(formErrors({ goal: "x", horizon: "y", category: null, topN: 0 })).toHaveLength(3);
  });
});

describe("chart constants", () => {
  it("cover the API's metric, source, and mode vocabularies", () => {
    expect([...METRICS]).toEqual([
      "popularity",
      "availability",
      "demand",
      "community",
      "demand_shortage",
    ]);
    expect([...SOURCES]).toEqual(["gh", "so", "combined"]);
    expect([...MODES]).toEqual(["level", "diff"]);
  });

  it("pins demand_shortage to the combined source", () => {
    expect(effectiveSource("demand_shortage", "gh")).toBe("combined");
    expect(effectiveSource("popularity", "gh")).toBe("gh");
  });
});

describe("LatestWins", () => {
  it("applies a lone request", async () => {
    const gate = new LatestWins();
    const applied: number[] = [];
    await gate.run("k", async () => 7, (v) => applied.push(v));
    expect(applied).toEqual([7]);
  });

  it("drops a stale response that resolves after a newer one started", async () => {
    const gate = new LatestWins();
    const applied: string[] = [];
    const slow = deferred<string>();
    const fast = deferred<string>();
    const first = gate.run("k", () => slow.promise, (v) => applied.push(v));
    const second = gate.run("k", () => fast.promise, (v) => applied.push(v));
    fast.resolve("fresh");
    await second;
    // the stale response arrives last — the dangerous ordering
    slow.resolve("stale");
    await first;
    expect(applied).toEqual(["fresh"]);
  });

  it("drops a stale failure silently", async () => {
    const gate = new LatestWins();
    const applied: string[] = [];
    const errors: unknown[] = [];
    const slow = deferred<string>();
    const fast = deferred<string>();
    const first = gate.run("k", () => slow.promise, (v) => applied.push(v), (e) => errors.push(e));
    const second = gate.run("k", () => fast.promise, (v) => applied.push(v), (e) => errors.push(e));
    fast.resolve("fresh");
    await second;
    slow.reject(new Error("stale failure"));
    await first;
    expect(applied).toEqual(["fresh"]);
    expect(errors).toEqual([]);
  });

  it("delivers a current failure to onError", async () => {
    const gate = new LatestWins();
    const errors: unknown[] = [];
    await gate.run("k", () => Promise.reject(new Error("boom")), () => {}, (e) => errors.push(e));
    expect(errors).toHaveLength(1);
    expect((errors[0] as Error).message).toBe("boom");
  });

  it("rethrows a current failure when no onError is given", async () => {
    const gate = new LatestWins();
    await expect(gate.run("k", () => Promise.reject(new Error("boom")), () => {})).rejects.toThrow(
      "boom",
    );
  });

  it("sequences keys independently", async () => {
    const gate = new LatestWins();
    const applied: string[] = [];
    const a = deferred<string>();
    const b = deferred<string>();
    const first = gate.run("a", () => a.promise, (v) => applied.push(v));
    const second = gate.run("b", () => b.promise, (v) => applied.push(v));
    b.resolve("b1");
    a.resolve("a1");
    await Promise.all([first, second]);
    expect(applied.sort()).toEqual(["a1", "b1"]);
  });
});
