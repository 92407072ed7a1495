/* tslint:disable */
/* eslint-disable */

export class Conversion {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly after_svg: string;
    readonly before_svg: string;
    /**
     * Converted document in canonical CoNLL-X.
     */
    readonly output: string;
    readonly report: string;
}

/**
 * Converts a PADT-style document with the built-in rules and draws the
 * `index`-th sentence before and after.
 */
export function convert_padt(conll: string, index: number, rtl: boolean): Conversion;

/**
 * SVG drawing of the 1-based `index`-th sentence of a CoNLL-X document.
 */
export function render_conll_svg(conll: string, index: number, rtl: boolean): string;

/**
 * Indented text drawing of the `index`-th sentence.
 */
export function render_conll_text(conll: string, index: number): string;

/**
 * Bundled PADT-style example sentences.
 */
export function sample_padt(): string;

/**
 * Paired t-test of per-fold scores given as whitespace or comma separated
 * lists; returns a short plain-text summary.
 */
export function t_test(baseline: string, system: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_conversion_free: (a: number, b: number) => void;
    readonly conversion_after_svg: (a: number) => [number, number];
    readonly conversion_before_svg: (a: number) => [number, number];
    readonly conversion_output: (a: number) => [number, number];
    readonly conversion_report: (a: number) => [number, number];
    readonly convert_padt: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly render_conll_svg: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly render_conll_text: (a: number, b: number, c: number) => [number, number, number, number];
    readonly sample_padt: () => [number, number];
    readonly t_test: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
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
