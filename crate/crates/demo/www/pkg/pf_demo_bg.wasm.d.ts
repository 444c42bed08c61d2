/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_demo_free: (a: number, b: number) => void;
export const __wbg_image_free: (a: number, b: number) => void;
export const __wbg_solvesummary_free: (a: number, b: number) => void;
export const demo_erosion_preview: (a: number, b: number) => [number, number, number];
export const demo_new: (a: number, b: number, c: number, d: number) => [number, number, number];
export const demo_piece_count: (a: number) => number;
export const demo_score_map: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
export const demo_scramble: (a: number, b: number, c: number, d: number) => [number, number, number];
export const demo_solve: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
export const demo_source: (a: number) => number;
export const demo_synthetic: (a: number, b: number, c: number) => number;
export const image_height: (a: number) => number;
export const image_rgba: (a: number) => [number, number];
export const image_width: (a: number) => number;
export const solvesummary_accuracy: (a: number) => number;
export const solvesummary_fitness: (a: number) => number;
export const solvesummary_generations: (a: number) => number;
export const solvesummary_image: (a: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
