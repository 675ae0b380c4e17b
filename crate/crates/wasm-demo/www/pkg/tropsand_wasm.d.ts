/* tslint:disable */
/* eslint-disable */

export class Demo {
    free(): void;
    [Symbol.dispose](): void;
    cols(): number;
    /**
     * Fits the curve; returns flattened segments in polygon coordinates.
     */
    fit(): Float64Array;
    /**
     * Heights row by row from the top; 255 marks non-sites.
     */
    heights(): Uint8Array;
    /**
     * Pass `NaN` coordinates to keep the preset's points.
     */
    constructor(preset: string, scale: number, px: number, py: number);
    /**
     * Lattice coordinates of the top-left cell.
     */
    origin(): Int32Array;
    polynomial(): string;
    rows(): number;
    scale(): number;
    topplings(): number;
    /**
     * Edge weights of the last fit.
     */
    weights(): Uint32Array;
}

/**
 * Flattened `[x1, y1, x2, y2, weight, ...]` for the corner locus of a
 * typed polynomial.
 */
export function polynomial_locus(text: string, reach: number): Float64Array;

export function preset_names(): string[];

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demo_free: (a: number, b: number) => void;
    readonly demo_cols: (a: number) => number;
    readonly demo_fit: (a: number) => [number, number, number, number];
    readonly demo_heights: (a: number) => [number, number];
    readonly demo_new: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly demo_origin: (a: number) => [number, number];
    readonly demo_polynomial: (a: number) => [number, number];
    readonly demo_rows: (a: number) => number;
    readonly demo_scale: (a: number) => number;
    readonly demo_topplings: (a: number) => number;
    readonly demo_weights: (a: number) => [number, number];
    readonly polynomial_locus: (a: number, b: number, c: number) => [number, number, number, number];
    readonly preset_names: () => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_drop_slice: (a: number, b: number) => void;
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
