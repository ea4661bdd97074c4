"""Command-line interface: prepare | train | join | split | eval | translit | synth.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 model or
vocabulary incompatibility. Batch prediction never aborts on a bad line;
it emits "ERR <reason>" for that line and still exits 0.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import corpus, joiner, report, rules, splitter, translit
from .errors import SandhiError
from .nn import TrainConfig, load_checkpoint, save_checkpoint

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_MODEL = 3

CONFIG_FIELDS = {
    "hidden_size": int,
    "batch_size": int,
    "epochs": int,
    "learning_rate": float,
    "rho": float,
    "epsilon": float,
    "seed": int,
    "max_decode_margin": int,
}

KIND_DEFAULTS = {
    "joiner": joiner.default_train_config,
    "tagger": splitter.default_tagger_config,
    "wsplitter": splitter.default_wsplitter_config,
}


class UsageError(SandhiError):
    pass


class ModelCompatError(SandhiError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sandhi", description="Sanskrit sandhi generation and splitting")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prepare", help="filter a raw corpus and emit train/val/test datasets")
    p.add_argument("--corpus", required=True, help="raw TSV: w1<TAB>w2<TAB>cw")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--script", choices=["slp1", "devanagari"], default="slp1")
    p.add_argument("--dedup", action="store_true", help="drop duplicate triples")

    p = sub.add_parser("train", help="train one of the three models")
    p.add_argument("kind", choices=["joiner", "tagger", "wsplitter"])
    p.add_argument("--data", required=True, help="directory written by `sandhi prepare`")
    p.add_argument("--out", required=True, help="checkpoint path")
    p.add_argument("--config", help="JSON config file (flags override it)")
    p.add_argument("--hidden-size", type=int)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--learning-rate", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--full-words", action="store_true",
                   help="joiner only: train on whole words (no truncation baseline)")

    p = sub.add_parser("join", help="apply sandhi to word pairs")
    p.add_argument("--model", required=True)
    p.add_argument("--input", help="batch file with lines 'w1 w2'")
    p.add_argument("--output", help="output file (default stdout)")
    p.add_argument("--script", choices=["slp1", "devanagari"], default="slp1")
    p.add_argument("words", nargs="*", help="w1 w2")

    p = sub.add_parser("split", help="split compound words")
    p.add_argument("--tagger", required=True)
    p.add_argument("--wsplitter", required=True)
    p.add_argument("--input", help="batch file with one compound per line")
    p.add_argument("--output", help="output file (default stdout)")
    p.add_argument("--script", choices=["slp1", "devanagari"], default="slp1")
    p.add_argument("words", nargs="*", help="compound word(s)")

    p = sub.add_parser("eval", help="evaluate a model on a test TSV")
    p.add_argument("kind", choices=["join", "split"])
    p.add_argument("--test", required=True, help="test triples TSV")
    p.add_argument("--model", help="joiner checkpoint (kind=join)")
    p.add_argument("--tagger", help="tagger checkpoint (kind=split)")
    p.add_argument("--wsplitter", help="window-splitter checkpoint (kind=split)")
    p.add_argument("--script", choices=["slp1", "devanagari"], default="slp1")
    p.add_argument("--report", help="write the JSON report (plus .failures.json and .png)")

    p = sub.add_parser("translit", help="convert between scripts")
    p.add_argument("--from", dest="src", required=True,
                   choices=["devanagari", "itrans", "slp1"])
    p.add_argument("--to", dest="dst", required=True, choices=["devanagari", "slp1"])
    p.add_argument("--input", help="input file (default: TEXT argument)")
    p.add_argument("--output", help="output file (default stdout)")
    p.add_argument("text", nargs="?", help="text to convert")

    p = sub.add_parser("synth", help="generate a synthetic corpus from the rule engine")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lexicon", help="lexicon file (default: bundled)")
    p.add_argument("--out", required=True, help="output TSV")
    return parser


def _load_config(kind: str, args) -> TrainConfig:
    values = KIND_DEFAULTS[kind]().to_dict()
    if args.config:
        try:
            file_values = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as err:
            raise UsageError(f"cannot read config {args.config}: {err}") from err
        if not isinstance(file_values, dict):
            raise UsageError("config file must hold a JSON object")
        for key, value in file_values.items():
            if key not in CONFIG_FIELDS:
                raise UsageError(f"unknown config key {key!r}")
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise UsageError(f"config key {key!r} must be a number")
            values[key] = CONFIG_FIELDS[key](value)
    for flag in ("hidden_size", "batch_size", "epochs", "learning_rate", "seed"):
        override = getattr(args, flag, None)
        if override is not None:
            values[flag] = override
    try:
        return TrainConfig(**values)
    except SandhiError as err:
        raise UsageError(str(err)) from err


def cmd_prepare(args) -> int:
    triples, diagnostics = corpus.parse_corpus(args.corpus,
                                               devanagari=args.script == "devanagari")
    if args.dedup:
        triples = list(dict.fromkeys(triples))
    annotated, histogram = corpus.annotate_retained(triples)
    if not annotated:
        for d in diagnostics[:20]:
            print(f"line {d.line}: {d.reason} {d.detail}", file=sys.stderr)
        raise SandhiError("no usable triples after filtering")

    split = corpus.split_dataset(annotated, seed=args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, part in (("train", split.train), ("validation", split.validation),
                       ("test", split.test)):
        corpus.write_triples_tsv(out / f"triples.{name}.tsv", (t for t, _ in part))
        corpus.write_pairs_tsv(out / f"joiner.{name}.tsv",
                               (corpus.joiner_example(t) for t, _ in part))
        corpus.write_tagger_tsv(out / f"stage1.{name}.tsv",
                                ((t.cw, corpus.aligned_tags(t, ann)) for t, ann in part))
        corpus.write_pairs_tsv(out / f"stage2.{name}.tsv",
                               (corpus.aligned_splitter_example(t, ann) for t, ann in part))

    manifest = {
        "seed": args.seed,
        "source": str(args.corpus),
        "counts": split.counts(),
        "parsed": len(triples),
        "retained": len(annotated),
        "discarded": histogram,
        "diagnostics": _diagnostic_histogram(diagnostics),
    }
    corpus.write_manifest(out / "manifest.json", manifest)
    print(f"retained {len(annotated)}/{len(triples)} triples "
          f"(train {len(split.train)}, validation {len(split.validation)}, "
          f"test {len(split.test)})")
    for reason, count in sorted(histogram.items()):
        print(f"  discarded {reason}: {count}")
    for reason, count in sorted(_diagnostic_histogram(diagnostics).items()):
        print(f"  diagnostic {reason}: {count}")
    return EXIT_OK


def _diagnostic_histogram(diagnostics) -> dict[str, int]:
    hist: dict[str, int] = {}
    for d in diagnostics:
        hist[d.reason] = hist.get(d.reason, 0) + 1
    return hist


def _read_triples(path: Path) -> list[corpus.SandhiTriple]:
    triples, _ = corpus.parse_corpus(path)
    return triples


def cmd_train(args) -> int:
    cfg = _load_config(args.kind, args)
    data_dir = Path(args.data)

    if args.kind == "joiner":
        train = _read_triples(data_dir / "triples.train.tsv")
        val = _read_triples(data_dir / "triples.validation.tsv")
        n, m = (joiner.FULL_WORD, joiner.FULL_WORD) if args.full_words else (5, 2)
        jcfg = joiner.JoinerConfig(n=n, m=m, train=cfg)
        model, history = joiner.train_joiner(train, jcfg, val or None)
    elif args.kind == "tagger":
        train = corpus.read_tagger_tsv(data_dir / "stage1.train.tsv")
        val = corpus.read_tagger_tsv(data_dir / "stage1.validation.tsv")
        model, history = splitter.train_stage1(train, cfg, val or None)
    else:
        train = corpus.read_pairs_tsv(data_dir / "stage2.train.tsv")
        val = corpus.read_pairs_tsv(data_dir / "stage2.validation.tsv")
        model, history = splitter.train_stage2(train, cfg, val or None)

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_checkpoint(model, out, args.kind)
    history_path = out.with_suffix(out.suffix + ".history.csv")
    figure_path = out.with_suffix(out.suffix + ".loss.png")
    report.write_history_csv(history, history_path)
    report.render_history_figure(history, figure_path, title=args.kind)
    last = history[-1]
    val_part = "" if last["val_loss"] is None else f", val_loss {last['val_loss']:.4f}"
    print(f"trained {args.kind}: {len(history)} epochs, "
          f"train_loss {last['train_loss']:.4f}{val_part}")
    print(f"checkpoint: {out}")
    print(f"history: {history_path}")
    print(f"figure: {figure_path}")
    return EXIT_OK


def _load_kind(path: str, expected: str):
    kind, model = load_checkpoint(path)
    if kind != expected:
        raise ModelCompatError(f"{path} holds a {kind!r} model, expected {expected!r}")
    return model


def _convert_in(text: str, script: str) -> str:
    return translit.devanagari_to_slp1(text) if script == "devanagari" else text


def _convert_out(text: str, script: str) -> str:
    return translit.slp1_to_devanagari(text) if script == "devanagari" else text


def _predict_lines(lines, one, out_fh, batch: bool) -> int:
    status = EXIT_OK
    for line in lines:
        line = line.strip()
        if not line:
            continue
        try:
            out_fh.write(one(line) + "\n")
        except SandhiError as err:
            if not batch:
                print(f"ERR {err}", file=sys.stderr)
                return EXIT_DATA
            out_fh.write(f"ERR {err}\n")
    return status


def cmd_join(args) -> int:
    model = _load_kind(args.model, "joiner")

    def one(line: str) -> str:
        parts = line.split()
        if len(parts) != 2:
            raise SandhiError(f"expected 'w1 w2', got {line!r}")
        w1, w2 = (_convert_in(p, args.script) for p in parts)
        return _convert_out(joiner.join(model, w1, w2), args.script)

    return _run_predict(args, one)


def cmd_split(args) -> int:
    tagger = _load_kind(args.tagger, "tagger")
    wsplit = _load_kind(args.wsplitter, "wsplitter")

    def one(line: str) -> str:
        compound = _convert_in(line.strip(), args.script)
        result = splitter.split(tagger, wsplit, compound)
        return (_convert_out(result.pw1, args.script) + " + "
                + _convert_out(result.pw2, args.script))

    return _run_predict(args, one)


def _run_predict(args, one) -> int:
    out_fh = open(args.output, "w", encoding="utf-8") if args.output else sys.stdout
    try:
        if args.input:
            lines = Path(args.input).read_text(encoding="utf-8").splitlines()
            return _predict_lines(lines, one, out_fh, batch=True)
        if not args.words:
            raise UsageError("provide words or --input FILE")
        return _predict_lines([" ".join(args.words)], one, out_fh, batch=False)
    finally:
        if args.output:
            out_fh.close()


def cmd_eval(args) -> int:
    triples, _ = corpus.parse_corpus(Path(args.test),
                                     devanagari=args.script == "devanagari")
    if not triples:
        raise SandhiError(f"no triples in {args.test}")

    if args.kind == "join":
        if not args.model:
            raise UsageError("eval join needs --model")
        model = _load_kind(args.model, "joiner")
        rep = _eval_join(model, triples)
    else:
        if not (args.tagger and args.wsplitter):
            raise UsageError("eval split needs --tagger and --wsplitter")
        tagger = _load_kind(args.tagger, "tagger")
        wsplit = _load_kind(args.wsplitter, "wsplitter")
        rep = _eval_split(tagger, wsplit, triples)

    print(rep.table())
    if args.report:
        report_path = Path(args.report)
        report.write_report(rep, report_path,
                            report_path.with_suffix(".failures.json"))
        report.render_eval_figure(rep, report_path.with_suffix(".png"))
        print(f"report: {report_path}")
    return EXIT_OK


def _eval_join(model, triples) -> report.EvalReport:
    metric = report.MetricResult(0, 0)
    rep = report.EvalReport(kind="join", metrics={"exact_match": metric})
    for t in triples:
        try:
            predicted = joiner.join(model, t.w1, t.w2)
        except SandhiError as err:
            predicted = f"<{err}>"
        metric.total += 1
        if predicted == t.cw:
            metric.correct += 1
        else:
            rep.add_failure({"w1": t.w1, "w2": t.w2, "expected": t.cw,
                             "predicted": predicted})
    return rep


def _eval_split(tagger, wsplit, triples) -> report.EvalReport:
    location = report.MetricResult(0, 0)
    exact = report.MetricResult(0, 0)
    rep = report.EvalReport(kind="split",
                            metrics={"location": location, "split": exact})
    for t in triples:
        location.total += 1
        exact.total += 1
        try:
            ann = corpus.annotate_window(t)
            gold_start, gold_width = corpus.gold_window_span(t, ann)
            result = splitter.split(tagger, wsplit, t.cw)
        except SandhiError as err:
            rep.add_failure({"cw": t.cw, "expected": [t.w1, t.w2],
                             "predicted": f"<{err}>"})
            continue
        loc_ok = (result.window.start, result.window.length) == (gold_start, gold_width)
        split_ok = (result.pw1, result.pw2) == (t.w1, t.w2)
        if loc_ok:
            location.correct += 1
        if split_ok:
            exact.correct += 1
        if not (loc_ok and split_ok):
            rep.add_failure({
                "cw": t.cw,
                "expected": [t.w1, t.w2],
                "predicted": [result.pw1, result.pw2],
                "gold_span": [gold_start, gold_width],
                "predicted_span": [result.window.start, result.window.length],
            })
    return rep


def cmd_translit(args) -> int:
    converters = {
        ("devanagari", "slp1"): translit.devanagari_to_slp1,
        ("itrans", "slp1"): translit.itrans_to_slp1,
        ("slp1", "devanagari"): translit.slp1_to_devanagari,
        ("slp1", "slp1"): lambda s: translit.validate_slp1(s),
        ("devanagari", "devanagari"): lambda s: translit.slp1_to_devanagari(
            translit.devanagari_to_slp1(s)),
        ("itrans", "devanagari"): lambda s: translit.slp1_to_devanagari(
            translit.itrans_to_slp1(s)),
    }
    convert = converters.get((args.src, args.dst))
    if convert is None:
        raise UsageError(f"cannot convert {args.src} -> {args.dst}")
    if args.input:
        text = Path(args.input).read_text(encoding="utf-8")
    elif args.text is not None:
        text = args.text
    else:
        raise UsageError("provide TEXT or --input FILE")
    converted = "\n".join(convert(line) for line in text.split("\n"))
    if args.output:
        Path(args.output).write_text(converted + ("\n" if not converted.endswith("\n") else ""),
                                     encoding="utf-8")
    else:
        print(converted)
    return EXIT_OK


def cmd_synth(args) -> int:
    lexicon = rules.load_lexicon(args.lexicon)
    triples = rules.generate_synthetic(lexicon, args.count, args.seed)
    out = Path(args.out)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    corpus.write_triples_tsv(out, triples)
    print(f"wrote {len(triples)} triples to {out}")
    return EXIT_OK


COMMANDS = {
    "prepare": cmd_prepare,
    "train": cmd_train,
    "join": cmd_join,
    "split": cmd_split,
    "eval": cmd_eval,
    "translit": cmd_translit,
    "synth": cmd_synth,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except ModelCompatError as err:
        print(f"model error: {err}", file=sys.stderr)
        return EXIT_MODEL
    except (SandhiError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
