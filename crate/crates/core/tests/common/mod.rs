pub mod oracle;
pub mod specfun_checks;
