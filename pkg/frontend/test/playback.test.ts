import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { BASE_STEP_MS, Player } from "../src/playback.js";
import { bundleYears } from "../src/data.js";
import { goldenBundle } from "./helpers.js";

describe("playback", () => {
  beforeEach(() => {
    vi.useFakeTimers();
  });
  afterEach(() => {
    vi.useRealTimers();
  });

  it("traverses the golden bundle 1976 to 2019 in order and stops", () => {
    const years = bundleYears(goldenBundle());
    expect(years[0]).toBe(1976);
    expect(years[years.length - 1]).toBe(2019);
    const visited: number[] = [];
    const player = new Player(years, (y) => visited.push(y));
    player.play();
    vi.advanceTimersByTime(BASE_STEP_MS * (years.length + 5));
    expect(visited).toEqual(years.slice(1)); // play starts from the current year
    expect(player.status).toBe("stopped");
    expect(player.year).toBe(2019);
    // no further ticks after the end
    const seen = visited.length;
    vi.advanceTimersByTime(BASE_STEP_MS * 10);
    expect(visited.length).toBe(seen);
  });

  it("pause freezes and resume continues from the same year", () => {
    const visited: number[] = [];
    const player = new Player([2000, 2001, 2002, 2003], (y) => visited.push(y));
    player.play();
    vi.advanceTimersByTime(BASE_STEP_MS);
    player.pause();
    const frozen = [...visited];
    vi.advanceTimersByTime(BASE_STEP_MS * 5);
    expect(visited).toEqual(frozen);
    player.resume();
    vi.advanceTimersByTime(BASE_STEP_MS * 5);
    expect(visited[visited.length - 1]).toBe(2003);
  });

  it("scrubbing renders the chosen year immediately", () => {
    const visited: number[] = [];
    const player = new Player([1990, 1991, 1998, 1999], (y) => visited.push(y));
    player.scrub(1998);
    expect(visited).toEqual([1998]);
    expect(player.year).toBe(1998);
  });

  it("double speed halves the wall-clock per year", () => {
    const visited: number[] = [];
    const player = new Player([0, 1, 2, 3, 4, 5, 6, 7, 8], (y) => visited.push(y));
    player.play(2);
    vi.advanceTimersByTime(BASE_STEP_MS * 2); // four half-steps
    expect(visited.length).toBe(4);
  });

  it("replaying after completion restarts from the beginning", () => {
    const visited: number[] = [];
    const player = new Player([1, 2, 3], (y) => visited.push(y));
    player.play();
    vi.advanceTimersByTime(BASE_STEP_MS * 5);
    expect(player.year).toBe(3);
    player.play();
    expect(player.year).toBe(1);
    vi.advanceTimersByTime(BASE_STEP_MS * 5);
    expect(player.year).toBe(3);
  });
});
