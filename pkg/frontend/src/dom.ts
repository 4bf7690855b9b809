/** Tiny DOM helper: el("div", {class: "x"}, child, "text"). */
export function el(
  tag: string,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElement {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

export function anchorId(article: string, label: string): string {
  return `fact-${article}-${label}`;
}
