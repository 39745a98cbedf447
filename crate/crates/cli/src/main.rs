//! `dhall`: products, relation checks, normal forms, graded dimension checks
//! and bound quiver checks from the command line.
//!
//! Exit codes: 0 success, 1 a verification failed, 2 usage or parse error.

use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use derived_hall::gentle::{check_gentle, lambda_quiver, BoundQuiver, GentleReport};
use derived_hall::hall::parse_word;
use derived_hall::presented::{GradedBound, NormalFormEngine, Presentation};
use derived_hall::{FreeElement, HallAlgebra, HallElement, Obj, Params};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "dhall", version, about = "Exact computations in derived Hall algebras")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Args)]
struct Category {
    /// Number of levels.
    #[arg(long)]
    r: u32,
    /// Shift parameter.
    #[arg(long)]
    m: i64,
}

impl Category {
    fn params(&self) -> Result<Params, Failure> {
        Params::new(self.r, self.m).map_err(|e| Failure::Usage(e.to_string()))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Product of two objects.
    Prod {
        #[command(flatten)]
        cat: Category,
        /// Evaluate coefficients at this prime power instead of keeping q symbolic.
        #[arg(long)]
        q: Option<i64>,
        a: String,
        b: String,
    },
    /// Evaluates every relation instance under the map to the Hall algebra.
    Relcheck {
        #[command(flatten)]
        cat: Category,
        /// Smallest free index.
        #[arg(long, default_value_t = -3, allow_hyphen_values = true)]
        lo: i64,
        /// Largest free index.
        #[arg(long, default_value_t = 3, allow_hyphen_values = true)]
        hi: i64,
        /// Only the relations among x generators.
        #[arg(long)]
        x_only: bool,
    },
    /// Normal form of a word such as "x(1,0) z(1)".
    Nf {
        #[command(flatten)]
        cat: Category,
        word: String,
    },
    /// Compares normal words with objects in a graded piece.
    Dims {
        #[command(flatten)]
        cat: Category,
        /// Number of z letters (Z summands).
        #[arg(long, default_value_t = 0)]
        d: usize,
        /// Smallest x index in the box.
        #[arg(long, allow_hyphen_values = true)]
        lo: i64,
        /// Largest x index in the box.
        #[arg(long, allow_hyphen_values = true)]
        hi: i64,
        /// Bound on each x degree in the box.
        #[arg(long, default_value_t = 1)]
        bound: i64,
    },
    /// Bound quiver utilities.
    Gentle {
        #[command(subcommand)]
        cmd: GentleCommand,
    },
}

#[derive(Subcommand)]
enum GentleCommand {
    /// Gentle and one-cycle conditions; `-` reads standard input.
    Check { file: String },
    /// Parameters (p,q,r) and, when r = p, the category parameters.
    Params { file: String },
    /// Prints the quiver Q(p,q) with the relations of Λ(p,q,r).
    Generate { p: usize, q: usize, r: usize },
}

enum Failure {
    Usage(String),
}

/// Command output: the document and whether verification passed.
struct Outcome {
    value: Value,
    ok: bool,
}

fn passed(value: Value) -> Result<Outcome, Failure> {
    Ok(Outcome { value, ok: true })
}

fn parse_obj(s: &str, p: &Params) -> Result<Obj, Failure> {
    let o: Obj = s.parse().map_err(|e| Failure::Usage(format!("object `{s}`: {e}")))?;
    o.check(p).map_err(|e| Failure::Usage(format!("object `{s}`: {e}")))?;
    Ok(o)
}

fn is_prime_power(q: i64) -> bool {
    if q < 2 {
        return false;
    }
    let p = (2..=q).find(|d| q % d == 0).unwrap();
    let mut v = q;
    while v % p == 0 {
        v /= p;
    }
    v == 1
}

fn hall_json(e: &HallElement, q: Option<i64>) -> Value {
    let rows: Vec<Value> = match q {
        None => e.iter().map(|(o, c)| json!({"obj": o.to_string(), "coeff": c.to_string()})).collect(),
        Some(q) => {
            e.eval_at(q).into_iter().map(|(o, c)| json!({"obj": o.to_string(), "coeff": c.to_string()})).collect()
        }
    };
    Value::Array(rows)
}

fn free_json(f: &FreeElement) -> Value {
    let rows: Vec<Value> =
        f.iter().map(|(w, c)| json!({"word": derived_hall::hall::word_to_string(w), "coeff": c.to_string()})).collect();
    Value::Array(rows)
}

fn read_source(file: &str) -> Result<String, Failure> {
    if file == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::Usage(e.to_string()))?;
        return Ok(s);
    }
    std::fs::read_to_string(file).map_err(|e| Failure::Usage(format!("{file}: {e}")))
}

fn read_quiver(file: &str) -> Result<BoundQuiver, Failure> {
    BoundQuiver::parse(&read_source(file)?).map_err(|e| Failure::Usage(format!("{file}:{e}")))
}

fn report_json(rep: &GentleReport) -> Value {
    json!({
        "out_degree": rep.out_degree,
        "in_degree": rep.in_degree,
        "unrelated_continuations": rep.unrelated_continuations,
        "related_continuations": rep.related_continuations,
        "connected": rep.connected,
        "gentle": rep.gentle,
        "one_cycle": rep.one_cycle,
        "cycle_relations": rep.cycle_relations.map(|(a, b)| json!([a, b])),
        "clock_condition": rep.clock_condition,
        "canonical": rep.canonical.map(|c| params_json(&c)),
    })
}

fn params_json(c: &derived_hall::gentle::CanonicalParams) -> Value {
    let mut v = json!({"p": c.p, "q": c.q, "r": c.r});
    if let Some((r, m)) = c.category {
        v["rC"] = json!(r);
        v["mC"] = json!(m);
    }
    v
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    match &cli.cmd {
        Command::Prod { cat, q, a, b } => {
            let p = cat.params()?;
            if let Some(q) = q {
                if !is_prime_power(*q) {
                    return Err(Failure::Usage(format!("q = {q} is not a prime power")));
                }
            }
            let (a, b) = (parse_obj(a, &p)?, parse_obj(b, &p)?);
            let h = HallAlgebra::new(p);
            passed(hall_json(&h.mul_basis(&a, &b), *q))
        }
        Command::Relcheck { cat, lo, hi, x_only } => {
            let p = cat.params()?;
            let h = HallAlgebra::new(p);
            let pres = if *x_only { Presentation::XOnly } else { Presentation::Full };
            let mut families: Vec<(String, usize, usize)> = Vec::new();
            let mut failures = Vec::new();
            for rel in h.relations(pres, *lo..=*hi) {
                let label = rel.family.label().to_string();
                let ix = match families.iter().position(|f| f.0 == label) {
                    Some(ix) => ix,
                    None => {
                        families.push((label.clone(), 0, 0));
                        families.len() - 1
                    }
                };
                families[ix].1 += 1;
                let v = h.eval(&rel.element);
                if !v.is_zero() {
                    families[ix].2 += 1;
                    failures.push(json!({
                        "family": label, "k": rel.k, "l": rel.l, "i": rel.i, "j": rel.j,
                        "residue": hall_json(&v, None),
                    }));
                }
            }
            let ok = failures.is_empty();
            let fams: Vec<Value> = families
                .iter()
                .map(|(f, n, bad)| json!({"family": f, "instances": n, "nonzero": bad, "pass": *bad == 0}))
                .collect();
            Ok(Outcome { value: json!({"families": fams, "failures": failures, "pass": ok}), ok })
        }
        Command::Nf { cat, word } => {
            let p = cat.params()?;
            let w = parse_word(word).map_err(|e| Failure::Usage(format!("word: {e}")))?;
            for g in &w {
                if !p.is_valid_level(g.level()) {
                    return Err(Failure::Usage(format!("level of {g} is outside [1, {}]", p.r)));
                }
            }
            let h = HallAlgebra::new(p);
            let engine = NormalFormEngine::new(&h);
            match engine.normal_form_word(&w) {
                Ok(f) => passed(free_json(&f)),
                Err(e) => Ok(Outcome { value: json!({"error": e.to_string()}), ok: false }),
            }
        }
        Command::Dims { cat, d, lo, hi, bound } => {
            let p = cat.params()?;
            if lo > hi || *bound < 0 {
                return Err(Failure::Usage("need lo <= hi and bound >= 0".into()));
            }
            let levels: Vec<_> = p.levels().collect();
            let h = HallAlgebra::new(p);
            let rep = h.graded_check(&GradedBound::boxed(*d, &levels, *lo, *hi, *bound));
            let ok = rep.equal && rep.rank_q2 == rep.normal_count && rep.rank_q3 == rep.normal_count;
            let value = json!({
                "normal_count": rep.normal_count,
                "object_count": rep.object_count,
                "equal": rep.equal,
                "rank_q2": rep.rank_q2,
                "rank_q3": rep.rank_q3,
            });
            Ok(Outcome { value, ok })
        }
        Command::Gentle { cmd } => match cmd {
            GentleCommand::Check { file } => {
                let rep = check_gentle(&read_quiver(file)?);
                let ok = rep.gentle;
                Ok(Outcome { value: report_json(&rep), ok })
            }
            GentleCommand::Params { file } => match check_gentle(&read_quiver(file)?).canonical {
                Some(c) => passed(params_json(&c)),
                None => Ok(Outcome { value: Value::Null, ok: false }),
            },
            GentleCommand::Generate { p, q, r } => {
                if *p == 0 || *r == 0 || r > p {
                    return Err(Failure::Usage("need p >= 1 and 1 <= r <= p".into()));
                }
                passed(Value::String(lambda_quiver(*p, *q, *r)))
            }
        },
    }
}

fn tsv(v: &Value) -> String {
    let cell = |v: &Value| match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    match v {
        Value::Array(rows) => rows
            .iter()
            .map(|r| match r {
                Value::Object(m) => m.values().map(cell).collect::<Vec<_>>().join("\t"),
                other => cell(other),
            })
            .collect::<Vec<_>>()
            .join("\n"),
        Value::Object(m) => m.iter().map(|(k, v)| format!("{k}\t{}", cell(v))).collect::<Vec<_>>().join("\n"),
        other => other.to_string(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            match (&out.value, cli.format) {
                (Value::String(text), _) => print!("{text}"),
                (_, Format::Json) => println!("{}", out.value),
                (_, Format::Tsv) => println!("{}", tsv(&out.value)),
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
