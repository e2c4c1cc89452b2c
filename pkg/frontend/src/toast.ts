/** Non-blocking notification stack; each toast removes itself. */
export function showToast(host: HTMLElement, message: string, ms = 4000): HTMLDivElement {
  const node = document.createElement("div");
  node.className = "toast";
  node.textContent = message;
  host.append(node);
  setTimeout(() => node.remove(), ms);
  return node;
}
