/** Spawn the Python JSON service for contract tests. */

import { ChildProcess, spawn } from "node:child_process";
import path from "node:path";
import { fileURLToPath } from "node:url";

const REPO_ROOT = path.resolve(
  path.dirname(fileURLToPath(import.meta.url)), "..", "..",
);

export interface RunningService {
  baseUrl: string;
  stop: () => void;
}

export async function startService(port: number): Promise<RunningService> {
  const python = process.env.PYTHON ?? "python3";
  const child: ChildProcess = spawn(
    python,
    ["-m", "lingequiv.cli", "serve", "--host", "127.0.0.1", "--port", String(port)],
    { cwd: REPO_ROOT, stdio: ["ignore", "pipe", "pipe"] },
  );
  let stderr = "";
  child.stderr?.on("data", (chunk) => {
    stderr += String(chunk);
  });
  const baseUrl = `http://127.0.0.1:${port}`;
  const probe = {
    graph: { vertices: ["A", "B"], latent: [], edges: [["A", "B"]] },
    params: {},
  };
  const deadline = Date.now() + 30_000;
  while (Date.now() < deadline) {
    if (child.exitCode !== null) {
      throw new Error(`service exited early: ${stderr}`);
    }
    try {
      const resp = await fetch(`${baseUrl}/irreducible`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(probe),
      });
      if (resp.ok) {
        return { baseUrl, stop: () => child.kill("SIGTERM") };
      }
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  child.kill("SIGTERM");
  throw new Error(`service did not come up on :${port}\n${stderr}`);
}
