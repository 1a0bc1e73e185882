use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical parameters of the receiver. Defaults are the reference design
/// (DNI = 900 W/m², T_air = 20 °C).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReceiverParams {
    pub eta_opt: f64,
    /// Geometric concentration.
    pub c_g: f64,
    /// Direct normal irradiance, W/m².
    pub dni: f64,
    // thermal resistivities, m²K/W
    pub r_cell: f64,
    pub r_sol: f64,
    pub r_cop: f64,
    pub r_cer: f64,
    pub r_intercon: f64,
    /// Ambient temperature, °C.
    pub t_air: f64,
    /// m²
    pub a_cell: f64,
    /// m²
    pub a_teg: f64,
    /// K/W
    pub r_heat_exch: f64,
    pub eta_cell_ref: f64,
    /// TEG fill factor, in (0, 1].
    pub f_star: f64,
    /// Cell temperature coefficient, 1/K.
    pub gamma_cell: f64,
    /// m
    pub b: f64,
    /// TEG leg length, m.
    pub l: f64,
    /// Thermoelectric figure of merit.
    pub zt: f64,
    /// W/(m K)
    pub k_teg: f64,
}

impl Default for ReceiverParams {
    fn default() -> Self {
        ReceiverParams {
            eta_opt: 0.85,
            c_g: 800.0,
            dni: 900.0,
            r_cell: 3e-6,
            r_sol: 1.603e-6,
            r_cop: 7.5e-7,
            r_cer: 8e-6,
            r_intercon: 2.331e-7,
            t_air: 20.0,
            a_cell: 9e-6,
            a_teg: 5.04e-5,
            r_heat_exch: 0.5,
            eta_cell_ref: 0.43,
            f_star: 0.7,
            gamma_cell: 4.6e-4,
            b: 5e-4,
            l: 5e-4,
            zt: 1.0,
            k_teg: 1.5,
        }
    }
}

impl ReceiverParams {
    pub const KEYS: [&'static str; 19] = [
        "eta_opt",
        "c_g",
        "dni",
        "r_cell",
        "r_sol",
        "r_cop",
        "r_cer",
        "r_intercon",
        "t_air",
        "a_cell",
        "a_teg",
        "r_heat_exch",
        "eta_cell_ref",
        "f_star",
        "gamma_cell",
        "b",
        "l",
        "zt",
        "k_teg",
    ];

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.eta_opt,
            self.c_g,
            self.dni,
            self.r_cell,
            self.r_sol,
            self.r_cop,
            self.r_cer,
            self.r_intercon,
            self.t_air,
            self.a_cell,
            self.a_teg,
            self.r_heat_exch,
            self.eta_cell_ref,
            self.f_star,
            self.gamma_cell,
            self.b,
            self.l,
            self.zt,
            self.k_teg,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("receiver parameters must be finite".into()));
        }
        for (name, v) in [
            ("a_cell", self.a_cell),
            ("a_teg", self.a_teg),
            ("b", self.b),
            ("l", self.l),
            ("k_teg", self.k_teg),
        ] {
            if v <= 0.0 {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.f_star > 0.0 && self.f_star <= 1.0) {
            return Err(Error::Domain(format!("f_star {} outside (0, 1]", self.f_star)));
        }
        if self.zt < 0.0 {
            return Err(Error::Domain(format!("ZT {} must be non-negative", self.zt)));
        }
        if self.dni < 0.0 {
            return Err(Error::Domain(format!("DNI {} must be non-negative", self.dni)));
        }
        Ok(())
    }

    /// Sets one parameter by name. Names are case-insensitive, so `C_g`,
    /// `DNI` and `R_heat_exch` are accepted as written in the parameter list.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        let slot = match key.trim().to_ascii_lowercase().as_str() {
            "eta_opt" => &mut self.eta_opt,
            "c_g" => &mut self.c_g,
            "dni" => &mut self.dni,
            "r_cell" => &mut self.r_cell,
            "r_sol" => &mut self.r_sol,
            "r_cop" => &mut self.r_cop,
            "r_cer" => &mut self.r_cer,
            "r_intercon" => &mut self.r_intercon,
            "t_air" => &mut self.t_air,
            "a_cell" => &mut self.a_cell,
            "a_teg" => &mut self.a_teg,
            "r_heat_exch" => &mut self.r_heat_exch,
            "eta_cell_ref" => &mut self.eta_cell_ref,
            "f_star" => &mut self.f_star,
            "gamma_cell" => &mut self.gamma_cell,
            "b" => &mut self.b,
            "l" => &mut self.l,
            "zt" => &mut self.zt,
            "k_teg" => &mut self.k_teg,
            other => return Err(Error::InvalidConfig(format!("unknown receiver parameter '{other}'"))),
        };
        *slot = value;
        Ok(())
    }

    /// Applies `key = value` lines on top of `self`. Blank lines and `#`
    /// comments are ignored.
    pub fn apply_kv(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse { line: i + 1, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected key=value, got '{line}'")))?;
            let v: f64 = value
                .trim()
                .parse()
                .map_err(|_| parse_err(format!("invalid number '{}' for {}", value.trim(), key.trim())))?;
            self.set(key, v).map_err(|e| parse_err(e.to_string()))?;
        }
        Ok(())
    }

    pub fn from_kv(text: &str) -> Result<Self> {
        let mut p = ReceiverParams::default();
        p.apply_kv(text)?;
        Ok(p)
    }

    pub fn with_conditions(mut self, dni: f64, t_air: f64) -> Self {
        self.dni = dni;
        self.t_air = t_air;
        self
    }
}
