// Optional browser companion for the documentation server. Pages work
// fully without it; this placeholder keeps /assets/ui.js resolvable.
