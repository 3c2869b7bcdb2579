/** Flat `key = value` config files with one [section] per subcommand,
 * the same format the analysis pipeline reads. Flags beat config. */
import * as fs from "fs";

export type Config = Record<string, Record<string, string>>;

export function readConfig(path: string): Config {
  const text = fs.readFileSync(path, "utf-8");
  const config: Config = {};
  let section = "";
  text.split("\n").forEach((raw, idx) => {
    const line = raw.trim();
    if (!line || line.startsWith("#") || line.startsWith(";")) return;
    const header = line.match(/^\[(.+)\]$/);
    if (header) {
      section = header[1].trim();
      config[section] = config[section] ?? {};
      return;
    }
    const eq = line.indexOf("=");
    if (eq < 0) throw new Error(`${path}:${idx + 1}: expected key = value`);
    if (!section) throw new Error(`${path}:${idx + 1}: key outside any section`);
    config[section][line.slice(0, eq).trim()] = line.slice(eq + 1).trim();
  });
  return config;
}

/** Effective setting: explicit flag, then config entry, then default. */
export function setting<T>(
  flag: T | undefined,
  config: Record<string, string> | undefined,
  key: string,
  parse: (s: string) => T,
  fallback: T
): T {
  if (flag !== undefined) return flag;
  const raw = config?.[key];
  if (raw !== undefined) return parse(raw);
  return fallback;
}
