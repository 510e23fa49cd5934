# Domain model: battle types, attrition dynamics and the analytic reduction
