#![allow(dead_code)]

pub mod l1_oracle;
