import { ChildProcess, spawn } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join, resolve } from "node:path";
import { fileURLToPath } from "node:url";

const HERE = dirname(fileURLToPath(import.meta.url));
export const REPO = resolve(HERE, "../..");

export interface RunningService {
  baseUrl: string;
  child: ChildProcess;
  stop: () => void;
}

/** Start the tutoring service in replay mode on a fresh store directory. */
export async function startService(): Promise<RunningService> {
  const workDir = mkdtempSync(join(tmpdir(), "aisensei-webui-"));
  const data = join(REPO, "data");
  const impasses: Record<string, Record<string, string>> = {};
  for (const band of ["A", "B", "C"]) {
    impasses[band] = {};
    for (const profile of ["S1", "S2", "S3"]) {
      impasses[band][profile] = join(data, "impasses", `${band}_${profile}.json`);
    }
  }
  const configPath = join(workDir, "service.json");
  writeFileSync(
    configPath,
    JSON.stringify({
      graph: join(data, "algebra2.kg.json"),
      impasses,
      data_dir: join(workDir, "store"),
      seed: 1234,
      gateway: { mode: "replay", cassette_dir: join(data, "cassettes"), model: "gpt-4" },
    }),
  );

  const port = 20000 + Math.floor(Math.random() * 20000);
  const pythonPath = [join(REPO, "src"), process.env.PYTHONPATH].filter(Boolean).join(":");
  const child = spawn(
    "python3",
    ["-m", "aisensei.cli", "serve", "--config", configPath, "--host", "127.0.0.1", "--port", String(port)],
    { cwd: REPO, stdio: ["ignore", "pipe", "pipe"], env: { ...process.env, PYTHONPATH: pythonPath } },
  );
  let stderr = "";
  child.stderr?.on("data", (chunk) => (stderr += String(chunk)));

  const baseUrl = `http://127.0.0.1:${port}`;
  const deadline = Date.now() + 30_000;
  for (;;) {
    if (child.exitCode !== null) {
      throw new Error(`service exited early (code ${child.exitCode}): ${stderr}`);
    }
    try {
      const resp = await fetch(`${baseUrl}/healthz`);
      if (resp.ok) {
        break;
      }
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) {
      child.kill();
      throw new Error(`service did not become healthy: ${stderr}`);
    }
    await sleep(150);
  }
  return { baseUrl, child, stop: () => child.kill() };
}

export function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

/** Must match the recorded follow-up cassette fixture. */
export const FOLLOWUP_INPUT = "Why does multiplying two negative numbers give a positive result?";

export const PRE_ANSWERS: Record<string, number> = {
  ai_familiarity: 4,
  llm_familiarity: 3,
  llm_use_frequency: 4,
  llm_usefulness_feedback: 3,
  llm_usefulness_questions: 4,
  llm_usefulness_current_learning: 3,
};

export const POST_ANSWERS: Record<string, number> = {
  ease_of_use: 4,
  correctness: 4,
  usefulness: 4,
  hallucination_frequency: 5,
};
