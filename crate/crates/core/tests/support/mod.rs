#![allow(dead_code)]

pub mod gof;
pub mod oracle;
