/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_demo_free: (a: number, b: number) => void;
export const demo_cols: (a: number) => number;
export const demo_fit: (a: number) => [number, number, number, number];
export const demo_heights: (a: number) => [number, number];
export const demo_new: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const demo_origin: (a: number) => [number, number];
export const demo_polynomial: (a: number) => [number, number];
export const demo_rows: (a: number) => number;
export const demo_scale: (a: number) => number;
export const demo_topplings: (a: number) => number;
export const demo_weights: (a: number) => [number, number];
export const polynomial_locus: (a: number, b: number, c: number) => [number, number, number, number];
export const preset_names: () => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_drop_slice: (a: number, b: number) => void;
export const __wbindgen_start: () => void;
