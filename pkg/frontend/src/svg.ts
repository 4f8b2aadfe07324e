/** Minimal deterministic SVG builder: pure string assembly, stable attribute order. */

export type Attrs = Record<string, string | number>;

function renderAttrs(attrs: Attrs): string {
  return Object.entries(attrs)
    .map(([key, value]) => ` ${key}="${value}"`)
    .join("");
}

export function el(tag: string, attrs: Attrs, children: string[] = []): string {
  if (children.length === 0) return `<${tag}${renderAttrs(attrs)}/>`;
  return `<${tag}${renderAttrs(attrs)}>${children.join("")}</${tag}>`;
}

export function text(content: string, attrs: Attrs): string {
  return `<text${renderAttrs(attrs)}>${escapeXml(content)}</text>`;
}

export function escapeXml(value: string): string {
  return value
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function document(width: number, height: number, body: string[]): string {
  const header = `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`;
  return `<?xml version="1.0" encoding="UTF-8"?>\n${header}${body.join("")}</svg>\n`;
}
