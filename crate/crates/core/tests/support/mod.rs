pub mod partition_oracle;
