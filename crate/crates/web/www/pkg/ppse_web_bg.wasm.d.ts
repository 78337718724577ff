/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const builtin_list: () => [number, number];
export const builtin_text: (a: number, b: number) => [number, number];
export const degenerate_record_curve: (a: number) => [number, number];
export const run_scenario: (a: number, b: number) => [number, number];
export const three_box_view: (a: number, b: number, c: number, d: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
