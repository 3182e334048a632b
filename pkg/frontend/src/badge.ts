// Certainty-class badge.  The class always comes from the API response;
// the UI only renders it (the badge <-> delta mapping therefore cannot
// drift from the server's classifier).

import type { ClassInfo } from "./types.js";

export interface Badge {
  text: string;
  colorHex: string;
  colorName: string;
}

export function badgeFor(cls: ClassInfo): Badge {
  return {
    text: `Class ${cls.code} (${cls.label})`,
    colorHex: cls.color_hex,
    colorName: cls.color,
  };
}

export function badgeHtml(cls: ClassInfo): string {
  const badge = badgeFor(cls);
  return `<span class="badge" style="background:${badge.colorHex}" title="${badge.colorName}">${badge.text}</span>`;
}
