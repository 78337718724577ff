/* tslint:disable */
/* eslint-disable */

export function builtin_list(): string;

/**
 * Canonical text of a builtin scenario, for loading into the editor.
 */
export function builtin_text(name: string): string;

/**
 * Probability of reading the degenerate eigenvalue as the first coefficient
 * d11 of its record sweeps from 0 to 1, with and without the pointer reset.
 */
export function degenerate_record_curve(samples: number): string;

/**
 * Parse and run a scenario; the report as JSON, or the located error.
 */
export function run_scenario(text: string): string;

/**
 * Three boxes, asking only about `which` (X, Y or Z) with the given
 * measurement mode (coarse, fine or twostep).
 */
export function three_box_view(which: string, mode: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly builtin_list: () => [number, number];
    readonly builtin_text: (a: number, b: number) => [number, number];
    readonly degenerate_record_curve: (a: number) => [number, number];
    readonly run_scenario: (a: number, b: number) => [number, number];
    readonly three_box_view: (a: number, b: number, c: number, d: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
