#!/usr/bin/env node
// SPDX-License-Identifier: Apache-2.0
//
// Minimal SMT-LIB2 REPL over the Z3 WebAssembly build (npm package
// "z3-solver"). Reads commands from stdin, evaluates them in one persistent
// context, writes solver output to stdout. Used as a fallback solver process
// when no native SMT solver is on PATH:
//
//   cd tools && npm install z3-solver
//   galatt solve game.game          # discovered automatically
//
// or explicitly: GALATT_SMT_SOLVER="node tools/z3smt2_shim.js" galatt ...

'use strict';

let initFn;
try {
  initFn = require('z3-solver').init;
} catch (e) {
  process.stderr.write(
    'z3smt2_shim: cannot load the "z3-solver" npm package (' + e.message + ')\n' +
    'run `npm install z3-solver` in the directory containing this script\n');
  process.exit(127);
}

// Splits the incoming byte stream into complete top-level SMT-LIB2 forms.
class FormSplitter {
  constructor() {
    this.buf = '';
    this.depth = 0;
    this.inString = false;
    this.inQuote = false;
    this.inComment = false;
    this.forms = [];
    this.start = 0;
    this.pos = 0;
  }
  push(chunk) {
    this.buf += chunk;
    for (; this.pos < this.buf.length; this.pos++) {
      const c = this.buf[this.pos];
      if (this.inComment) {
        if (c === '\n') this.inComment = false;
        continue;
      }
      if (this.inString) {
        if (c === '"') this.inString = false;
        continue;
      }
      if (this.inQuote) {
        if (c === '|') this.inQuote = false;
        continue;
      }
      if (c === ';') { this.inComment = true; continue; }
      if (c === '"') { this.inString = true; continue; }
      if (c === '|') { this.inQuote = true; continue; }
      if (c === '(') { this.depth++; continue; }
      if (c === ')') {
        this.depth--;
        if (this.depth === 0) {
          this.forms.push(this.buf.slice(this.start, this.pos + 1));
          this.start = this.pos + 1;
        }
      }
    }
    if (this.start > 0) {
      this.buf = this.buf.slice(this.start);
      this.pos -= this.start;
      this.start = 0;
    }
    const out = this.forms;
    this.forms = [];
    return out;
  }
}

(async () => {
  const { Z3 } = await initFn();
  const cfg = Z3.mk_config();
  const ctx = Z3.mk_context(cfg);

  const splitter = new FormSplitter();
  const queue = [];
  let draining = false;
  let done = false;

  async function drain() {
    if (draining) return;
    draining = true;
    while (queue.length > 0) {
      const form = queue.shift();
      if (/^\s*\(\s*exit\s*\)\s*$/.test(form)) process.exit(0);
      let out;
      try {
        out = await Z3.eval_smtlib2_string(ctx, form);
      } catch (e) {
        out = '(error "' + String(e.message || e).replace(/"/g, "'") + '")\n';
      }
      if (out && out.length > 0) process.stdout.write(out);
    }
    draining = false;
    if (done) process.exit(0);
  }

  process.stdin.setEncoding('utf8');
  process.stdin.on('data', (chunk) => {
    for (const form of splitter.push(chunk)) queue.push(form);
    drain();
  });
  process.stdin.on('end', () => {
    done = true;
    drain();
  });
})().catch((e) => {
  process.stderr.write('z3smt2_shim: initialization failed: ' + String(e) + '\n');
  process.exit(127);
});
