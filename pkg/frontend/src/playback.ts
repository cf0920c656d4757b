/** Year playback: steps through the bundle's years in order at a chosen
 * speed, stops at the end, supports pause/resume and scrubbing. */

export const BASE_STEP_MS = 400;

export type PlaybackStatus = "stopped" | "playing" | "paused";

export class Player {
  private years: number[];
  private index = 0;
  private timer: ReturnType<typeof setInterval> | null = null;
  private onYear: (year: number) => void;
  private onStop: () => void;
  status: PlaybackStatus = "stopped";
  speed = 1;

  constructor(years: number[], onYear: (year: number) => void, onStop: () => void = () => {}) {
    if (!years.length) throw new Error("playback needs at least one year");
    this.years = [...years];
    this.onYear = onYear;
    this.onStop = onStop;
  }

  get year(): number {
    return this.years[this.index];
  }

  play(speed = this.speed): void {
    this.speed = speed;
    if (this.status === "stopped" && this.index === this.years.length - 1) {
      this.index = 0; // restart from the beginning after a completed run
      this.onYear(this.year);
    }
    this.clearTimer();
    this.status = "playing";
    this.timer = setInterval(() => this.step(), BASE_STEP_MS / this.speed);
  }

  pause(): void {
    if (this.status !== "playing") return;
    this.clearTimer();
    this.status = "paused";
  }

  resume(): void {
    if (this.status !== "paused") return;
    this.play(this.speed);
  }

  scrub(year: number): void {
    const i = this.years.indexOf(year);
    if (i < 0) return;
    this.index = i;
    this.onYear(this.year);
  }

  stop(): void {
    this.clearTimer();
    this.status = "stopped";
    this.onStop();
  }

  private step(): void {
    if (this.index >= this.years.length - 1) {
      this.stop();
      return;
    }
    this.index += 1;
    this.onYear(this.year);
    if (this.index === this.years.length - 1) {
      this.stop();
    }
  }

  private clearTimer(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }
}
