//! Gate lists over a qubit register, with a plain-text form for auditing.
//!
//! Text format, one gate per line (blank lines and `#` comments ignored):
//!
//! ```text
//! width 2
//! rot 0 re00 im00 re01 im01 re10 im10 re11 im11
//! cnot 0 1 +
//! ```
//!
//! `rot` carries the 2×2 matrix row-major. The trailing `+`/`-` on `cnot`
//! names the computational state of the control that triggers the flip.

use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix2;
use num_complex::Complex64;
use thiserror::Error;

use crate::qops::{CMatrix, CVector, ONE};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("gate touches qubit {qubit} outside a width-{width} register")]
    QubitOutOfRange { qubit: usize, width: usize },
    #[error("cnot control and target must differ (both {0})")]
    SameQubit(usize),
    #[error("state dimension {got} is not a multiple of 2^{width}")]
    StateDimension { got: usize, width: usize },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// Control polarity of a CNOT, in the computational basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControlState {
    /// Fires when the control is |+⟩ (basis index 0).
    Plus,
    /// Fires when the control is |−⟩ (basis index 1); the textbook CNOT.
    Minus,
}

impl ControlState {
    fn bit(self) -> usize {
        match self {
            ControlState::Plus => 0,
            ControlState::Minus => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    Rotation {
        qubit: usize,
        matrix: Matrix2<Complex64>,
    },
    Cnot {
        control: usize,
        target: usize,
        active: ControlState,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    width: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            gates: Vec::new(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn push(&mut self, gate: Gate) -> Result<(), CircuitError> {
        let check = |qubit: usize| {
            if qubit >= self.width {
                Err(CircuitError::QubitOutOfRange {
                    qubit,
                    width: self.width,
                })
            } else {
                Ok(())
            }
        };
        match &gate {
            Gate::Rotation { qubit, .. } => check(*qubit)?,
            Gate::Cnot {
                control, target, ..
            } => {
                check(*control)?;
                check(*target)?;
                if control == target {
                    return Err(CircuitError::SameQubit(*control));
                }
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Applies the circuit in place. `state` may carry trailing non-qubit
    /// factors (a bath), in which case its length is 2^width × bath_dim.
    pub fn apply(&self, state: &mut CVector) -> Result<(), CircuitError> {
        let reg = 1usize << self.width;
        if !state.len().is_multiple_of(reg) {
            return Err(CircuitError::StateDimension {
                got: state.len(),
                width: self.width,
            });
        }
        let trailing = state.len() / reg;
        for gate in &self.gates {
            match gate {
                Gate::Rotation { qubit, matrix } => {
                    apply_single(state, self.width, trailing, *qubit, matrix)
                }
                Gate::Cnot {
                    control,
                    target,
                    active,
                } => apply_cnot(state, self.width, trailing, *control, *target, active.bit()),
            }
        }
        Ok(())
    }

    /// Dense unitary of the circuit on the bare register.
    pub fn unitary(&self) -> CMatrix {
        let dim = 1usize << self.width;
        let mut u = CMatrix::zeros(dim, dim);
        for col in 0..dim {
            let mut v = CVector::zeros(dim);
            v[col] = ONE;
            self.apply(&mut v).expect("register-sized state");
            u.set_column(col, &v);
        }
        u
    }
}

fn stride(width: usize, trailing: usize, qubit: usize) -> usize {
    (1usize << (width - 1 - qubit)) * trailing
}

fn apply_single(
    state: &mut CVector,
    width: usize,
    trailing: usize,
    qubit: usize,
    m: &Matrix2<Complex64>,
) {
    let s = stride(width, trailing, qubit);
    for base in 0..state.len() {
        if !(base / s).is_multiple_of(2) {
            continue;
        }
        let (a, b) = (state[base], state[base + s]);
        state[base] = m[(0, 0)] * a + m[(0, 1)] * b;
        state[base + s] = m[(1, 0)] * a + m[(1, 1)] * b;
    }
}

fn apply_cnot(
    state: &mut CVector,
    width: usize,
    trailing: usize,
    control: usize,
    target: usize,
    active: usize,
) {
    let cs = stride(width, trailing, control);
    let ts = stride(width, trailing, target);
    for idx in 0..state.len() {
        if (idx / ts).is_multiple_of(2) && (idx / cs) % 2 == active {
            state.swap_rows(idx, idx + ts);
        }
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "width {}", self.width)?;
        for gate in &self.gates {
            match gate {
                Gate::Rotation { qubit, matrix } => {
                    write!(f, "rot {qubit}")?;
                    for z in [
                        matrix[(0, 0)],
                        matrix[(0, 1)],
                        matrix[(1, 0)],
                        matrix[(1, 1)],
                    ] {
                        write!(f, " {} {}", z.re, z.im)?;
                    }
                    writeln!(f)?;
                }
                Gate::Cnot {
                    control,
                    target,
                    active,
                } => {
                    let sign = match active {
                        ControlState::Plus => '+',
                        ControlState::Minus => '-',
                    };
                    writeln!(f, "cnot {control} {target} {sign}")?;
                }
            }
        }
        Ok(())
    }
}

impl FromStr for Circuit {
    type Err = CircuitError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut circuit: Option<Circuit> = None;
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |reason: &str| CircuitError::Parse {
                line,
                reason: reason.to_string(),
            };
            let fields: Vec<&str> = content.split_whitespace().collect();
            let int = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| err(&format!("bad integer {s:?}")))
            };
            let float = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| err(&format!("bad number {s:?}")))
            };
            match (fields[0], circuit.as_mut()) {
                ("width", None) if fields.len() == 2 => {
                    circuit = Some(Circuit::new(int(fields[1])?))
                }
                ("width", _) => return Err(err("width must appear once, first")),
                (_, None) => return Err(err("missing width header")),
                ("rot", Some(c)) if fields.len() == 10 => {
                    let qubit = int(fields[1])?;
                    let mut z = [Complex64::new(0.0, 0.0); 4];
                    for (k, slot) in z.iter_mut().enumerate() {
                        *slot =
                            Complex64::new(float(fields[2 + 2 * k])?, float(fields[3 + 2 * k])?);
                    }
                    let matrix = Matrix2::new(z[0], z[1], z[2], z[3]);
                    c.push(Gate::Rotation { qubit, matrix })
                        .map_err(|e| err(&e.to_string()))?;
                }
                ("cnot", Some(c)) if fields.len() == 4 => {
                    let active = match fields[3] {
                        "+" => ControlState::Plus,
                        "-" => ControlState::Minus,
                        other => return Err(err(&format!("bad control polarity {other:?}"))),
                    };
                    c.push(Gate::Cnot {
                        control: int(fields[1])?,
                        target: int(fields[2])?,
                        active,
                    })
                    .map_err(|e| err(&e.to_string()))?;
                }
                (kind, Some(_)) => return Err(err(&format!("malformed {kind:?} gate"))),
            }
        }
        circuit.ok_or(CircuitError::Parse {
            line: 0,
            reason: "empty circuit text".into(),
        })
    }
}
