/** Periodic page refresh: refetch every 30 s, show a transient
 * "Refreshing..." popup for 2 s, coalesce overlapping fetches. */

export const REFRESH_INTERVAL_MS = 30_000;
export const POPUP_VISIBLE_MS = 2_000;

export class AutoRefresher {
  private timer: ReturnType<typeof setInterval> | null = null;
  private popupTimer: ReturnType<typeof setTimeout> | null = null;
  private inFlight = false;

  constructor(
    private reload: () => Promise<void>,
    private popup: HTMLElement,
    private onError: (err: unknown) => void = () => {}
  ) {}

  start(): void {
    this.stop();
    this.timer = setInterval(() => void this.tick(), REFRESH_INTERVAL_MS);
  }

  /** Cancel the timer and hide the popup; safe to call repeatedly. */
  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
    if (this.popupTimer !== null) {
      clearTimeout(this.popupTimer);
      this.popupTimer = null;
    }
    this.popup.style.display = "none";
  }

  async tick(): Promise<void> {
    if (this.inFlight) {
      return; // coalesce: at most one fetch in flight
    }
    this.inFlight = true;
    this.showPopup();
    try {
      await this.reload();
    } catch (err) {
      this.onError(err); // keep previous data, retry next tick
    } finally {
      this.inFlight = false;
    }
  }

  private showPopup(): void {
    this.popup.style.display = "block";
    if (this.popupTimer !== null) {
      clearTimeout(this.popupTimer);
    }
    this.popupTimer = setTimeout(() => {
      this.popup.style.display = "none";
      this.popupTimer = null;
    }, POPUP_VISIBLE_MS);
  }
}
