import { Client } from "./api.js";
import { LineTool } from "./line_tool.js";
import { StaircodeView, renderEmptyState } from "./staircode_view.js";
import { el } from "./svg.js";

export type App = { view: StaircodeView; tool: LineTool };

/** Fetch the document and assemble the scene, line tool, and panels.
 * Resolves to null (leaving an empty state behind) if the server is
 * unreachable or answers with an error.
 */
export async function boot(root: HTMLElement, client = new Client()): Promise<App | null> {
  let doc;
  try {
    doc = await client.staircode();
  } catch (err) {
    renderEmptyState(root, `could not load staircode: ${err instanceof Error ? err.message : err}`);
    return null;
  }
  root.replaceChildren();
  const sceneHost = el("div", "scene-host");
  const panels = el("div", "panels");
  const barcodePanel = el("div", "panel barcode-panel");
  const treegramPanel = el("div", "panel treegram-panel");
  panels.append(
    el("h3", "panel-title", "fibered barcode"),
    barcodePanel,
    el("h3", "panel-title", "fibered treegram"),
    treegramPanel,
  );
  let toastHost = document.getElementById("toasts");
  if (!toastHost) {
    toastHost = el("div");
    toastHost.id = "toasts";
    document.body.append(toastHost);
  }
  root.append(sceneHost, panels);

  const view = new StaircodeView(sceneHost, doc.data);
  const tool = new LineTool(view, client, { barcodePanel, treegramPanel, toastHost });
  await tool.flush();
  return { view, tool };
}

const appRoot = typeof document !== "undefined" ? document.getElementById("app") : null;
if (appRoot) void boot(appRoot);
