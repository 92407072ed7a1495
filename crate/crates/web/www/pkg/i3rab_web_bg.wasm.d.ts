/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_conversion_free: (a: number, b: number) => void;
export const conversion_after_svg: (a: number) => [number, number];
export const conversion_before_svg: (a: number) => [number, number];
export const conversion_output: (a: number) => [number, number];
export const conversion_report: (a: number) => [number, number];
export const convert_padt: (a: number, b: number, c: number, d: number) => [number, number, number];
export const render_conll_svg: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const render_conll_text: (a: number, b: number, c: number) => [number, number, number, number];
export const sample_padt: () => [number, number];
export const t_test: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;
